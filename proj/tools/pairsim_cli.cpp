// Command-line front end. Talks to the library only through the C interface.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pairsim/pairsim.h"

namespace {

int report(pairsim_status status) {
  if (status != PAIRSIM_OK) std::fprintf(stderr, "pairsim: error: %s\n", pairsim_last_error());
  return static_cast<int>(status);
}

int run_config(const std::string& config, const std::string& out, bool has_seed,
               std::uint64_t seed) {
  pairsim_scenario* scenario = nullptr;
  if (auto s = pairsim_scenario_load(config.c_str(), &scenario); s != PAIRSIM_OK) return report(s);
  const auto status = pairsim_scenario_run(scenario, out.c_str(), has_seed ? 1 : 0, seed);
  pairsim_scenario_free(scenario);
  if (status == PAIRSIM_OK) std::printf("wrote outputs to %s\n", out.c_str());
  return report(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-pair source simulator: run scenarios, analyze histograms and scans, "
               "design poling periods."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pairsim_version()));

  std::string format = "csv";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output data format")->check(CLI::IsMember({"csv"}));
  };

  // run
  auto* run = app.add_subcommand("run", "Run a scenario configuration");
  std::string config, out, out_positional;
  std::uint64_t seed = 0;
  run->add_option("config", config, "Scenario configuration file")->required();
  run->add_option("out_dir", out_positional, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--out", out, "Output directory (default: out)");
  add_format(run);

  // analyze
  auto* an = app.add_subcommand("analyze", "Analyze a histogram or scan CSV");
  std::string input, report_path, an_out;
  pairsim_analyze_options opts;
  pairsim_analyze_options_init(&opts);
  bool beamsplitter = false, no_pileup = false;
  an->add_option("input", input, "histogram (bin_start_ns,counts) or scan (phase_rad,counts) CSV")
      ->required();
  an->add_option("--report", report_path, "Report path (default: <out>/report.txt)");
  an->add_option("--out", an_out, "Output directory for report.txt");
  an->add_option("--spacing-ns", opts.spacing_ns, "Expected peak spacing")->capture_default_str();
  an->add_flag("--beamsplitter", beamsplitter, "Pairs split by a 50/50 coupler when inferring mu");
  an->add_flag("--no-pileup", no_pileup, "Skip the single-stop pile-up correction");
  an->add_option("--singles1-hz", opts.singles_1_hz, "Singles rate of the start detector");
  an->add_option("--singles2-hz", opts.singles_2_hz, "Singles rate of the stop detector");
  an->add_option("--window-ns", opts.window_ns, "Coincidence window width");
  an->add_option("--duration-s", opts.duration_s, "Counting time per scan point");
  add_format(an);

  // qpm
  auto* qp = app.add_subcommand("qpm", "Solve the poling period and PDC spectrum");
  std::string qpm_config, qpm_out;
  pairsim_qpm_options q;
  pairsim_qpm_options_init(&q);
  std::string model = q.model;
  std::vector<double> params;
  std::size_t grid_points = 0;
  qp->add_option("config", qpm_config, "Optional qpm_design configuration file");
  qp->add_option("--model", model, "lithium_niobate, constant or cauchy")->capture_default_str();
  qp->add_option("--param", params, "Model parameter (repeat for several)");
  qp->add_option("--temperature-c", q.temperature_c, "Crystal temperature")->capture_default_str();
  qp->add_option("--pump-nm", q.pump_nm, "Pump wavelength")->capture_default_str();
  qp->add_option("--signal-nm", q.signal_nm, "Signal wavelength")->capture_default_str();
  qp->add_option("--length-mm", q.length_mm, "Interaction length")->capture_default_str();
  qp->add_option("--grid-start-nm", q.grid_start_nm, "First signal wavelength of the spectrum");
  qp->add_option("--grid-stop-nm", q.grid_stop_nm, "Last signal wavelength of the spectrum");
  qp->add_option("--grid-points", grid_points, "Spectrum points");
  qp->add_option("--out", qpm_out, "Output directory (default: out)");
  add_format(qp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(PAIRSIM_CONFIG_ERROR);
  }

  if (run->parsed()) {
    if (!out.empty() && !out_positional.empty() && out != out_positional) {
      std::fprintf(stderr, "pairsim: error: conflicting output directories\n");
      return PAIRSIM_CONFIG_ERROR;
    }
    const std::string dir = !out.empty() ? out : !out_positional.empty() ? out_positional : "out";
    return run_config(config, dir, seed_opt->count() > 0, seed);
  }

  if (an->parsed()) {
    opts.beamsplitter = beamsplitter ? 1 : 0;
    opts.no_pileup = no_pileup ? 1 : 0;
    std::string path = report_path;
    if (path.empty()) {
      const std::string dir = an_out.empty() ? "out" : an_out;
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      path = (std::filesystem::path(dir) / "report.txt").string();
    }
    const auto status = pairsim_analyze_file(input.c_str(), &opts, path.c_str());
    if (status == PAIRSIM_OK) std::printf("wrote %s\n", path.c_str());
    return report(status);
  }

  const std::string dir = qpm_out.empty() ? "out" : qpm_out;
  if (!qpm_config.empty()) return run_config(qpm_config, dir, false, 0);
  q.model = model.c_str();
  q.model_params = params.data();
  q.n_params = params.size();
  q.grid_points = grid_points;
  const auto status = pairsim_qpm_design(&q, dir.c_str());
  if (status == PAIRSIM_OK) std::printf("wrote outputs to %s\n", dir.c_str());
  return report(status);
}
