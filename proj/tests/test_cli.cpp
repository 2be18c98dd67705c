#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "pairsim_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(PAIRSIM_CLI) + " " + args + " >" + (work / "stdout.txt").string() +
                          " 2>" + (work / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* small_cw = "kind = cw_coincidence\nseed = 5\nsource.efficiency = 1e-6\n"
                       "source.pump_power_uw = 1.0\nrun.duration_ns = 1e7\n";

struct Workdir {
  Workdir() {
    fs::remove_all(work);
    fs::create_directories(work);
  }
  ~Workdir() { fs::remove_all(work); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  Workdir w;
  CHECK(run("--help") == 0);
  CHECK(slurp(work / "stdout.txt").find("run") != std::string::npos);
  CHECK(run("") == 2);
  CHECK(run("run") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("same seed gives byte-identical outputs") {
  Workdir w;
  write(work / "cw.cfg", small_cw);
  REQUIRE(run("run " + (work / "cw.cfg").string() + " " + (work / "a").string()) == 0);
  REQUIRE(run("run " + (work / "cw.cfg").string() + " --out " + (work / "b").string()) == 0);
  for (const char* f : {"histogram.csv", "histogram.meta", "report.txt", "manifest.txt"}) {
    CHECK(fs::exists(work / "a" / f));
    CHECK(slurp(work / "a" / f) == slurp(work / "b" / f));
  }
  REQUIRE(run("run " + (work / "cw.cfg").string() + " --seed 6 --out " + (work / "c").string()) == 0);
  CHECK(slurp(work / "a" / "histogram.csv") != slurp(work / "c" / "histogram.csv"));
}

TEST_CASE("misspelled key exits 2 and names the key") {
  Workdir w;
  write(work / "bad.cfg", std::string(small_cw) + "arm1.transmision = 0.5\n");
  CHECK(run("run " + (work / "bad.cfg").string() + " --out " + (work / "o").string()) == 2);
  CHECK(slurp(work / "stderr.txt").find("arm1.transmision") != std::string::npos);
}

TEST_CASE("missing config exits 3") {
  Workdir w;
  CHECK(run("run " + (work / "none.cfg").string()) == 3);
}

TEST_CASE("unwritable output directory exits 3") {
  Workdir w;
  write(work / "cw.cfg", small_cw);
  CHECK(run("run " + (work / "cw.cfg").string() + " --out /proc/pairsim_forbidden") == 3);
}

TEST_CASE("qpm with a constant index exits 4") {
  Workdir w;
  CHECK(run("qpm --model constant --param 2.2 --out " + (work / "q").string()) == 4);
  CHECK(slurp(work / "stderr.txt").find("error") != std::string::npos);
  CHECK(run("qpm --grid-points 101 --out " + (work / "q").string()) == 0);
  CHECK(slurp(work / "q" / "report.txt").find("period_um = 12.40") != std::string::npos);
}

TEST_CASE("analyze a run's histogram and a scan") {
  Workdir w;
  write(work / "cw.cfg", small_cw);
  REQUIRE(run("run " + (work / "cw.cfg").string() + " --out " + (work / "a").string()) == 0);
  CHECK(run("analyze " + (work / "a" / "histogram.csv").string() + " --report " +
            (work / "r.txt").string()) == 0);
  CHECK(slurp(work / "r.txt").find("input = histogram") != std::string::npos);
  write(work / "bad.csv", "phase_rad,counts\n0,1\nzz,2\n");
  CHECK(run("analyze " + (work / "bad.csv").string() + " --out " + (work / "x").string()) == 2);
  CHECK(slurp(work / "stderr.txt").find(":3:") != std::string::npos);
}

}  // TEST_SUITE
