#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pairsim/pairsim.h"

namespace fs = std::filesystem;

namespace {

const char* small_cw = "kind = cw_coincidence\nseed = 5\nsource.efficiency = 1e-6\n"
                       "source.pump_power_uw = 1.0\nrun.duration_ns = 1e7\n";

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and empty error") {
  CHECK(std::string(pairsim_version()) == "1.0.0");
  double idler = 0.0;
  CHECK(pairsim_conjugate_wavelength(657.0, 1314.0, &idler) == PAIRSIM_OK);
  CHECK(idler == doctest::Approx(1314.0));
  CHECK(std::string(pairsim_last_error()).empty());
}

TEST_CASE("scenario lifecycle") {
  pairsim_scenario* s = nullptr;
  REQUIRE(pairsim_scenario_parse(small_cw, &s) == PAIRSIM_OK);
  const char* kind = nullptr;
  CHECK(pairsim_scenario_kind(s, &kind) == PAIRSIM_OK);
  CHECK(std::string(kind) == "cw_coincidence");
  const auto dir = scratch("pairsim_capi_run");
  CHECK(pairsim_scenario_run(s, dir.c_str(), 1, 99) == PAIRSIM_OK);
  CHECK(fs::exists(dir / "histogram.csv"));
  CHECK(fs::exists(dir / "report.txt"));
  pairsim_scenario_free(s);

  pairsim_histogram* h = nullptr;
  REQUIRE(pairsim_histogram_load((dir / "histogram.csv").c_str(), &h) == PAIRSIM_OK);
  size_t bins = 0;
  double origin = -1.0, width = 0.0;
  CHECK(pairsim_histogram_bins(h, &bins, &origin, &width) == PAIRSIM_OK);
  CHECK(bins == 600);
  CHECK(origin == 0.0);
  CHECK(width == doctest::Approx(0.1));
  std::vector<uint64_t> counts(bins);
  CHECK(pairsim_histogram_counts(h, counts.data(), counts.size()) == PAIRSIM_OK);
  double rate = -1.0;
  CHECK(pairsim_histogram_sca(h, 30.0, 60.0, 1.0, &rate) == PAIRSIM_OK);
  uint64_t total = 0;
  for (auto c : counts) total += c;
  CHECK(rate == doctest::Approx(static_cast<double>(total)));
  CHECK(pairsim_histogram_sca(h, 59.0, 4.0, 1.0, &rate) == PAIRSIM_CONFIG_ERROR);
  pairsim_histogram_free(h);
  fs::remove_all(dir);
}

TEST_CASE("error codes and messages") {
  pairsim_scenario* s = nullptr;
  CHECK(pairsim_scenario_parse((std::string(small_cw) + "bogus.key = 1\n").c_str(), &s) ==
        PAIRSIM_CONFIG_ERROR);
  CHECK(s == nullptr);
  CHECK(std::string(pairsim_last_error()).find("bogus.key") != std::string::npos);
  CHECK(pairsim_scenario_load("/nonexistent/x.cfg", &s) == PAIRSIM_IO_ERROR);
  CHECK(pairsim_scenario_parse(nullptr, &s) == PAIRSIM_USAGE_ERROR);
  double period = 0.0;
  const double n = 2.2;
  CHECK(pairsim_qpm_period("constant", &n, 1, 657.0, 1314.0, 100.0, &period) ==
        PAIRSIM_NUMERIC_ERROR);
  CHECK(pairsim_qpm_period("lithium_niobate", nullptr, 0, 657.0, 1314.0, 100.0, &period) ==
        PAIRSIM_OK);
  CHECK(period == doctest::Approx(12.405588).epsilon(1e-6));
  double eta = 0.0;
  CHECK(pairsim_estimate_efficiency(1e5, 1e5, 0.0, 1.0, 657.0, &eta) == PAIRSIM_NUMERIC_ERROR);
}

TEST_CASE("numeric helpers") {
  double eta = 0.0;
  CHECK(pairsim_estimate_efficiency(150e3, 150e3, 1500, 1.0, 657.0, &eta) == PAIRSIM_OK);
  CHECK(eta == doctest::Approx(2.27e-6).epsilon(1e-3));
  std::vector<double> phases, counts;
  for (int i = 0; i < 8; ++i) {
    phases.push_back(2.0 * M_PI * i / 8);
    counts.push_back(100.0 * (1.0 + 0.92 * std::cos(phases.back())));
  }
  double v = 0.0, sigma = 0.0;
  CHECK(pairsim_fit_visibility(phases.data(), counts.data(), phases.size(), &v, &sigma) == PAIRSIM_OK);
  CHECK(v == doctest::Approx(0.92).epsilon(1e-9));
  double sig = 0.0, chsh = 0.0;
  CHECK(pairsim_bell_significance(0.92, 0.01, &sig, &chsh) == PAIRSIM_OK);
  CHECK(sig == doctest::Approx(21.29).epsilon(1e-3));
  CHECK(pairsim_bell_significance(0.92, 0.0, &sig, &chsh) != PAIRSIM_OK);
}

TEST_CASE("analyze and qpm design through the C interface") {
  const auto dir = scratch("pairsim_capi_analyze");
  {
    std::ofstream out(dir / "scan.csv");
    out << "phase_rad,counts\n";
    for (int i = 0; i < 8; ++i) out << 2.0 * M_PI * i / 8 << ',' << 50.0 * (1.0 + 0.5 * std::cos(2.0 * M_PI * i / 8)) << '\n';
  }
  pairsim_analyze_options a;
  pairsim_analyze_options_init(&a);
  CHECK(a.spacing_ns == 12.5);
  CHECK(pairsim_analyze_file((dir / "scan.csv").c_str(), &a, (dir / "report.txt").c_str()) ==
        PAIRSIM_OK);
  CHECK(fs::exists(dir / "report.txt"));

  pairsim_qpm_options q;
  pairsim_qpm_options_init(&q);
  q.grid_points = 101;
  CHECK(pairsim_qpm_design(&q, (dir / "qpm").c_str()) == PAIRSIM_OK);
  CHECK(fs::exists(dir / "qpm" / "spectrum.csv"));
  fs::remove_all(dir);
}

}  // TEST_SUITE
