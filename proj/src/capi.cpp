#include "pairsim/pairsim.h"

#include <cmath>
#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "pairsim/analyze.hpp"
#include "pairsim/error.hpp"
#include "pairsim/io.hpp"
#include "pairsim/qpm.hpp"
#include "pairsim/scenario.hpp"
#include "pairsim/source.hpp"
#include "pairsim/units.hpp"

struct pairsim_scenario {
  pairsim::scenario::Scenario value;
};

struct pairsim_histogram {
  pairsim::detect::Histogram value;
};

namespace {

thread_local std::string last_error;

pairsim_status fail(pairsim_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
pairsim_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return PAIRSIM_OK;
  } catch (const pairsim::Error& e) {
    return fail(static_cast<pairsim_status>(pairsim::category_of(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PAIRSIM_NUMERIC_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(PAIRSIM_NUMERIC_ERROR, e.what());
  }
}

#define PAIRSIM_REQUIRE(cond, what) \
  if (!(cond)) return fail(PAIRSIM_USAGE_ERROR, what)

}  // namespace

extern "C" {

const char* pairsim_version(void) { return pairsim::scenario::version; }

const char* pairsim_last_error(void) { return last_error.c_str(); }

pairsim_status pairsim_scenario_load(const char* path, pairsim_scenario** out) {
  PAIRSIM_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new pairsim_scenario{pairsim::scenario::load(path)}; });
}

pairsim_status pairsim_scenario_parse(const char* text, pairsim_scenario** out) {
  PAIRSIM_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new pairsim_scenario{pairsim::scenario::parse(text)}; });
}

void pairsim_scenario_free(pairsim_scenario* scenario) { delete scenario; }

pairsim_status pairsim_scenario_kind(const pairsim_scenario* scenario, const char** kind) {
  PAIRSIM_REQUIRE(scenario && kind, "null argument");
  *kind = pairsim::scenario::kind_name(scenario->value.kind);
  return guarded([] {});
}

pairsim_status pairsim_scenario_run(const pairsim_scenario* scenario, const char* out_dir,
                                    int has_seed_override, uint64_t seed_override) {
  PAIRSIM_REQUIRE(scenario && out_dir, "null argument");
  return guarded([&] {
    std::optional<std::uint64_t> seed;
    if (has_seed_override) seed = seed_override;
    const auto files = pairsim::scenario::run(scenario->value, seed);
    pairsim::scenario::write_files(files, out_dir);
  });
}

void pairsim_analyze_options_init(pairsim_analyze_options* options) {
  if (!options) return;
  *options = pairsim_analyze_options{};
  options->spacing_ns = 12.5;
}

pairsim_status pairsim_analyze_file(const char* input_path, const pairsim_analyze_options* options,
                                    const char* report_path) {
  PAIRSIM_REQUIRE(input_path && report_path, "null argument");
  pairsim_analyze_options o;
  pairsim_analyze_options_init(&o);
  if (options) o = *options;
  PAIRSIM_REQUIRE(o.spacing_ns > 0.0, "peak spacing must be positive");
  return guarded([&] {
    pairsim::scenario::AnalyzeOptions a;
    a.spacing = o.spacing_ns * pairsim::units::ns;
    a.splitting = o.beamsplitter ? pairsim::analyze::PairSplitting::beamsplitter
                                 : pairsim::analyze::PairSplitting::deterministic;
    a.pileup_correction = !o.no_pileup;
    a.singles_1 = o.singles_1_hz;
    a.singles_2 = o.singles_2_hz;
    a.window = o.window_ns * pairsim::units::ns;
    a.duration = o.duration_s;
    const auto report = pairsim::scenario::analyze_file(input_path, a);
    pairsim::io::write_file(report_path, report);
  });
}

void pairsim_qpm_options_init(pairsim_qpm_options* options) {
  if (!options) return;
  *options = pairsim_qpm_options{};
  options->model = "lithium_niobate";
  options->temperature_c = 100.0;
  options->pump_nm = 657.0;
  options->signal_nm = 1314.0;
  options->length_mm = 32.0;
}

pairsim_status pairsim_qpm_design(const pairsim_qpm_options* options, const char* out_dir) {
  PAIRSIM_REQUIRE(options && out_dir && options->model, "null argument");
  PAIRSIM_REQUIRE(options->n_params == 0 || options->model_params, "null model parameters");
  return guarded([&] {
    using namespace pairsim::units;
    pairsim::scenario::QpmDesign q;
    q.model = options->model;
    q.model_params.assign(options->model_params, options->model_params + options->n_params);
    q.temperature = options->temperature_c;
    q.pump = options->pump_nm * nm;
    q.signal = options->signal_nm * nm;
    q.length = options->length_mm * mm;
    q.grid_start = options->grid_start_nm > 0.0 ? options->grid_start_nm * nm : q.signal - 120 * nm;
    q.grid_stop = options->grid_stop_nm > 0.0 ? options->grid_stop_nm * nm : q.signal + 120 * nm;
    if (options->grid_points > 0) q.grid_points = options->grid_points;
    pairsim::scenario::write_files(pairsim::scenario::qpm_design(q), out_dir);
  });
}

pairsim_status pairsim_qpm_period(const char* model, const double* model_params, size_t n_params,
                                  double pump_nm, double signal_nm, double temperature_c,
                                  double* period_um) {
  PAIRSIM_REQUIRE(model && period_um, "null argument");
  PAIRSIM_REQUIRE(n_params == 0 || model_params, "null model parameters");
  return guarded([&] {
    const std::vector<double> params(model_params, model_params + n_params);
    const auto m = pairsim::qpm::model_by_name(model, params);
    *period_um = pairsim::qpm::solve_poling_period(m, pump_nm * 1e-9, signal_nm * 1e-9,
                                                   temperature_c) /
                 1e-6;
  });
}

pairsim_status pairsim_histogram_load(const char* path, pairsim_histogram** out) {
  PAIRSIM_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::istringstream in(pairsim::io::read_file(path));
    *out = new pairsim_histogram{pairsim::io::read_histogram_csv(in, path)};
  });
}

void pairsim_histogram_free(pairsim_histogram* histogram) { delete histogram; }

pairsim_status pairsim_histogram_bins(const pairsim_histogram* histogram, size_t* bins,
                                      double* origin_ns, double* bin_width_ns) {
  PAIRSIM_REQUIRE(histogram, "null histogram");
  if (bins) *bins = histogram->value.counts.size();
  if (origin_ns) *origin_ns = histogram->value.origin / 1e-9;
  if (bin_width_ns) *bin_width_ns = histogram->value.bin_width / 1e-9;
  return guarded([] {});
}

pairsim_status pairsim_histogram_counts(const pairsim_histogram* histogram, uint64_t* counts,
                                        size_t capacity) {
  PAIRSIM_REQUIRE(histogram && (counts || capacity == 0), "null argument");
  const auto& c = histogram->value.counts;
  for (size_t i = 0; i < capacity && i < c.size(); ++i) counts[i] = c[i];
  return guarded([] {});
}

pairsim_status pairsim_histogram_sca(const pairsim_histogram* histogram, double center_ns,
                                     double width_ns, double duration_s, double* rate_hz) {
  PAIRSIM_REQUIRE(histogram && rate_hz, "null argument");
  return guarded([&] {
    *rate_hz = pairsim::detect::sca(histogram->value, {center_ns * 1e-9, width_ns * 1e-9},
                                    duration_s);
  });
}

pairsim_status pairsim_conjugate_wavelength(double pump_nm, double signal_nm, double* idler_nm) {
  PAIRSIM_REQUIRE(idler_nm, "null argument");
  return guarded([&] {
    *idler_nm = pairsim::qpm::conjugate_wavelength(pump_nm * 1e-9, signal_nm * 1e-9) / 1e-9;
  });
}

pairsim_status pairsim_estimate_efficiency(double singles_1_hz, double singles_2_hz,
                                           double coincidences_hz, double pump_power_uw,
                                           double pump_wavelength_nm, double* eta) {
  PAIRSIM_REQUIRE(eta, "null argument");
  return guarded([&] {
    *eta = pairsim::source::estimate_efficiency(singles_1_hz, singles_2_hz, coincidences_hz,
                                                pump_power_uw * 1e-6, pump_wavelength_nm * 1e-9);
  });
}

pairsim_status pairsim_fit_visibility(const double* phases_rad, const double* counts, size_t n,
                                      double* visibility, double* sigma) {
  PAIRSIM_REQUIRE(phases_rad && counts && visibility, "null argument");
  return guarded([&] {
    std::vector<pairsim::analyze::ScanPoint> scan(n);
    for (size_t i = 0; i < n; ++i) scan[i] = {phases_rad[i], counts[i]};
    const auto fit = pairsim::analyze::fit_visibility(scan);
    *visibility = fit.visibility;
    if (sigma) *sigma = fit.sigma;
  });
}

pairsim_status pairsim_bell_significance(double visibility, double sigma, double* sigmas,
                                         double* chsh) {
  PAIRSIM_REQUIRE(sigmas, "null argument");
  return guarded([&] {
    const auto b = pairsim::analyze::bell_significance(visibility, sigma);
    *sigmas = b.sigmas;
    if (chsh) *chsh = b.chsh;
  });
}

}  // extern "C"
