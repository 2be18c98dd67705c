#include "pairsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pairsim/error.hpp"
#include "pairsim/io.hpp"
#include "pairsim/qpm.hpp"
#include "pairsim/simulate.hpp"
#include "pairsim/units.hpp"

namespace pairsim::scenario {

namespace {

using units::ns;

constexpr std::uint64_t stream_scan = 0x5ca00001;

Kind parse_kind(const Config& cfg) {
  const auto k = cfg.require_string("kind");
  if (k == "cw_coincidence") return Kind::cw_coincidence;
  if (k == "pulsed_coincidence") return Kind::pulsed_coincidence;
  if (k == "franson") return Kind::franson;
  if (k == "timebin") return Kind::timebin;
  if (k == "qpm_design") return Kind::qpm_design;
  cfg.fail("kind", "unknown kind '" + k +
                       "' (cw_coincidence, pulsed_coincidence, franson, timebin, qpm_design)");
}

double positive(const Config& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) cfg.fail(key, "must be positive");
  return v;
}

double non_negative(const Config& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) cfg.fail(key, "must be non-negative");
  return v;
}

double probability(const Config& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v >= 0.0 && v <= 1.0)) cfg.fail(key, "must lie in [0, 1]");
  return v;
}

detect::DetectorSpec read_detector(const Config& cfg, const std::string& prefix) {
  detect::DetectorSpec d;
  d.efficiency = probability(cfg, prefix + ".efficiency", 1.0);
  d.dark_rate = non_negative(cfg, prefix + ".dark_rate_hz", 0.0);
  d.dead_time = non_negative(cfg, prefix + ".dead_time_ns", 0.0) * ns;
  d.jitter = non_negative(cfg, prefix + ".jitter_ns", 0.0) * ns;
  return d;
}

pathcalc::InterferometerSpec read_interferometer(const Config& cfg, const std::string& prefix,
                                                 double imbalance) {
  pathcalc::InterferometerSpec s;
  s.imbalance = imbalance;
  s.phase = cfg.get_double(prefix + ".phase_rad", 0.0);
  s.transmission_short = probability(cfg, prefix + ".transmission_short", 1.0);
  s.transmission_long = probability(cfg, prefix + ".transmission_long", 1.0);
  s.loss = probability(cfg, prefix + ".loss", 1.0);
  return s;
}

int read_port(const Config& cfg, const std::string& key, int fallback) {
  const auto p = cfg.get_int(key, fallback);
  if (p != 0 && p != 1) cfg.fail(key, "output port must be 0 or 1");
  return static_cast<int>(p);
}

std::string join(const std::vector<double>& values, double scale) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += io::format_number(values[i] / scale);
  }
  return out;
}

std::uint64_t require_seed(const Scenario& s, std::optional<std::uint64_t> override_seed) {
  if (override_seed) return *override_seed;
  if (!s.seed) throw Error(Errc::config, "key 'seed': required for simulation kinds");
  return *s.seed;
}

simulate::PipelineSpec base_pipeline(const Scenario& s, std::uint64_t seed) {
  simulate::PipelineSpec p;
  p.source = s.source;
  p.detectors = s.detectors;
  p.slot = s.alice.imbalance;
  p.tac_range = s.tac_range;
  p.tac_bin = s.tac_bin;
  p.stop_delay = s.stop_delay;
  p.duration = s.duration;
  p.pulses = s.pulses;
  p.seed = seed;
  p.record_arrivals = s.write_events;
  return p;
}

// Width actually covered by the histogram bins counted for `window`.
double effective_width(const detect::Histogram& h, const detect::CoincidenceWindow& w) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    if (w.contains(h.bin_center(i))) ++n;
  return static_cast<double>(n) * h.bin_width;
}

void add_histogram_files(Files& files, const Scenario& s, const detect::Histogram& h,
                         double duration, std::uint64_t seed) {
  std::ostringstream csv;
  io::write_histogram_csv(csv, h);
  files["histogram.csv"] = csv.str();
  io::HistogramMeta meta;
  meta.t0 = h.origin;
  meta.bin_width = h.bin_width;
  meta.duration = duration;
  meta.stop_delay = s.stop_delay;
  meta.starts = h.starts;
  meta.seed = seed;
  meta.config_digest = s.digest;
  files["histogram.meta"] = io::histogram_meta_text(meta);
}

std::string scan_text(const std::vector<analyze::ScanPoint>& scan) {
  std::ostringstream out;
  io::write_scan_csv(out, scan);
  return out.str();
}

void add_events(Files& files, const simulate::PipelineResult& r) {
  std::ostringstream out;
  source::write_events_csv(out, r.arrivals);
  files["events.csv"] = out.str();
}

double analytic_visibility(pathcalc::Setup setup, const pathcalc::BinKey& key, double v_dephase) {
  setup.v_dephase = v_dephase;
  std::vector<double> phases;
  for (int i = 0; i < 720; ++i) phases.push_back(two_pi * i / 720.0);
  const auto scan = pathcalc::visibility_scan(setup, phases, key);
  return pathcalc::fringe_visibility(scan);
}

void add_fit(io::Report& r, const std::string& suffix, const analyze::VisibilityFit& f) {
  r.add("V_" + suffix, f.visibility);
  r.add("sigma_" + suffix, f.sigma);
}

void add_bell(io::Report& r, const analyze::VisibilityFit& f) {
  const auto b = analyze::bell_significance(f.visibility, f.sigma);
  r.add("bell_sigma", b.sigmas);
  r.add("S_chsh", b.chsh);
  r.add("above_bell_bound", f.visibility > analyze::bell_visibility_bound);
}

Files run_cw(const Scenario& s, std::uint64_t seed) {
  const auto model =
      simulate::coincidence_model(s.routing, s.detection(0), s.detection(1));
  auto spec = base_pipeline(s, seed);
  const auto r = simulate::run_pipeline(spec, model);

  const double T = r.duration;
  const double S1 = static_cast<double>(r.singles[0]) / T;
  const double S2 = static_cast<double>(r.singles[1]) / T;
  const double raw = detect::sca(r.histogram, s.window, T);
  // Accidentals seen by the converter: accepted start rate times stop rate.
  const double accepted = static_cast<double>(r.histogram.starts) / T;
  const double acc = accepted * S2 * effective_width(r.histogram, s.window);
  const double net = raw - acc;

  io::Report rep;
  rep.add("kind", kind_name(s.kind));
  rep.add("seed", seed);
  rep.add("duration_s", T);
  rep.add("pair_rate_hz", s.source.pair_rate());
  rep.add("S1_hz", S1);
  rep.add("S2_hz", S2);
  rep.add("R_C_raw_hz", raw);
  rep.add("R_acc_hz", acc);
  rep.add("R_C_hz", net);
  rep.add("eta_configured", s.source.efficiency);
  rep.add("eta_estimate", source::estimate_efficiency(S1, S2, net, s.source.pump_power,
                                                      s.source.pump_wavelength));
  Files files;
  add_histogram_files(files, s, r.histogram, T, seed);
  files["report.txt"] = rep.text();
  if (s.write_events) add_events(files, r);
  return files;
}

Files run_pulsed(const Scenario& s, std::uint64_t seed) {
  const auto model =
      simulate::coincidence_model(s.routing, s.detection(0), s.detection(1));
  const auto r = simulate::run_pipeline(base_pipeline(s, seed), model);
  const double T = r.duration;
  const auto corrected = analyze::correct_pileup(r.histogram);
  const auto peaks = analyze::find_peaks(corrected, r.histogram.origin, r.histogram.bin_width,
                                         s.source.period());

  io::Report rep;
  rep.add("kind", kind_name(s.kind));
  rep.add("seed", seed);
  rep.add("pulses", s.pulses);
  rep.add("duration_s", T);
  rep.add("photons_per_pulse", source::photons_per_pulse(s.source.pump_power,
                                                         s.source.repetition_rate,
                                                         s.source.pump_wavelength));
  rep.add("mu_configured", s.source.mean_pairs_per_pulse());
  rep.add("S1_hz", static_cast<double>(r.singles[0]) / T);
  rep.add("S2_hz", static_cast<double>(r.singles[1]) / T);
  rep.add("pileup_corrected", true);
  rep.add("peaks", static_cast<std::uint64_t>(peaks.peaks.size()));
  if (peaks.empty()) {
    rep.add("no_peaks", true);
  } else {
    std::vector<double> pos, area;
    for (const auto& p : peaks.peaks) {
      pos.push_back(p.position);
      area.push_back(p.area);
    }
    rep.add("peak_positions_ns", join(pos, ns));
    rep.add("peak_areas", join(area, 1.0));
    rep.add("peak_spacing_ns", peaks.mean_spacing() / ns);
    if (peaks.peaks.size() >= 2) {
      const auto mu = analyze::infer_mu(
          peaks, s.routing == source::Routing::deterministic ? analyze::PairSplitting::deterministic
                                                             : analyze::PairSplitting::beamsplitter);
      rep.add("r", mu.ratio);
      rep.add("mu", mu.mu);
    }
  }
  Files files;
  add_histogram_files(files, s, r.histogram, T, seed);
  files["report.txt"] = rep.text();
  if (s.write_events) add_events(files, r);
  return files;
}

// Dark rate that brings the accidental-to-signal ratio of the central window
// to `ratio`, given the photon singles and signal rates of the model.
double injected_dark_rate(const Scenario& s, const std::vector<simulate::OutcomeModel>& models) {
  const double pairs = s.source.pair_rate();
  double S1 = 0.0, S2 = 0.0, sig = 0.0;
  for (const auto& m : models) {
    S1 += pairs * m.mean_hits(0);
    S2 += pairs * m.mean_hits(1);
    sig += pairs * m.coincidence_probability(0);
  }
  const double n = static_cast<double>(models.size());
  S1 = S1 / n + s.detectors[0].dark_rate;
  S2 = S2 / n + s.detectors[1].dark_rate;
  sig /= n;
  const double target = s.accidental_ratio * sig / s.window.width;  // (S1+D)(S2+D)
  const double b = S1 + S2;
  const double c = S1 * S2 - target;
  if (c > 0.0)
    throw Error(Errc::config,
                "key 'franson.accidental_ratio': photon singles alone already exceed the "
                "requested accidental ratio");
  return 0.5 * (-b + std::sqrt(b * b - 4.0 * c));
}

Files run_interference(const Scenario& s, std::uint64_t seed) {
  const bool timebin = s.kind == Kind::timebin;
  std::vector<simulate::OutcomeModel> models;
  for (double phi : s.phases)
    models.push_back(
        simulate::interference_model(s.setup(phi), s.routing, s.detection(0), s.detection(1)));

  Scenario run = s;
  double dark = 0.0;
  if (!timebin && s.accidental_ratio > 0.0) {
    dark = injected_dark_rate(s, models);
    run.detectors[0].dark_rate += dark;
    run.detectors[1].dark_rate += dark;
  }

  std::vector<analyze::ScanPoint> twofold, threefold;
  detect::Histogram total;
  double T = 0.0;
  double singles[2] = {0.0, 0.0};
  Files files;
  for (std::size_t i = 0; i < s.phases.size(); ++i) {
    auto spec = base_pipeline(run, derive_seed(seed, stream_scan, i));
    spec.keep_coincidences = timebin;
    spec.record_arrivals = false;
    const auto r = simulate::run_pipeline(spec, models[i]);
    if (i == 0) {
      total = r.histogram;
    } else {
      total.merge(r.histogram);
    }
    T += r.duration;
    singles[0] += static_cast<double>(r.singles[0]);
    singles[1] += static_cast<double>(r.singles[1]);
    twofold.push_back({s.phases[i],
                       static_cast<double>(detect::window_counts(r.histogram, s.window))});
    if (timebin)
      threefold.push_back({s.phases[i], static_cast<double>(detect::threefold_counts(
                                            r.coincidences, s.window, s.source.period(),
                                            s.reference_a, s.reference_b))});
  }
  const double point_time = T / static_cast<double>(s.phases.size());
  const double S1 = singles[0] / T;
  const double S2 = singles[1] / T;

  io::Report rep;
  rep.add("kind", kind_name(s.kind));
  rep.add("seed", seed);
  rep.add("points", static_cast<std::uint64_t>(s.phases.size()));
  rep.add("point_duration_s", point_time);
  rep.add("v_dephase", s.v_dephase);
  rep.add("S1_hz", S1);
  rep.add("S2_hz", S2);

  const auto setup = s.setup(0.0);
  if (!timebin) {
    const auto raw = analyze::fit_visibility(twofold);
    const double tau = effective_width(total, s.window);
    // Starts that hit a running conversion never reach the window, so the
    // accidental estimate uses the start rate accepted by the converter.
    const double accepted = static_cast<double>(total.starts) / T;
    const auto net = analyze::subtract_accidentals(twofold, accepted, S2, tau, point_time);
    add_fit(rep, "raw", raw);
    add_fit(rep, "net", net.fit);
    rep.add("phase_offset_rad", raw.phase_offset);
    add_bell(rep, raw);
    rep.add("accidentals_per_point", net.accidental_counts);
    rep.add("accidental_ratio_target", s.accidental_ratio);
    rep.add("accidental_ratio_measured",
            net.accidental_counts / (raw.baseline - net.accidental_counts));
    rep.add("injected_dark_rate_hz", dark);
    rep.add("V_analytic_ideal", analytic_visibility(setup, {0}, 1.0));
    rep.add("V_analytic_model", analytic_visibility(setup, {0}, s.v_dephase));
    // Peak areas of the phase-averaged histogram in windows of equal width.
    const double unit = s.alice.imbalance;
    const char* names[3] = {"area_minus", "area_central", "area_plus"};
    for (int k = -1; k <= 1; ++k) {
      detect::CoincidenceWindow w{s.window.center + k * unit, s.window.width};
      rep.add(names[k + 1], static_cast<std::uint64_t>(detect::window_counts(total, w)));
    }
    rep.add("start_rate_accepted_hz", accepted);
    rep.add("area_accidental", accepted * S2 * tau * T);
    files["scan.csv"] = scan_text(twofold);
  } else {
    const auto three = analyze::fit_visibility(threefold);
    const auto two = analyze::fit_visibility(twofold);
    add_fit(rep, "raw", three);
    // Three-fold coincidences carry negligible accidentals; no subtraction.
    add_fit(rep, "net", three);
    rep.add("phase_offset_rad", three.phase_offset);
    add_bell(rep, three);
    add_fit(rep, "twofold", two);
    rep.add("V_twofold_analytic", analytic_visibility(setup, {0}, 1.0));
    rep.add("V_twofold_model", analytic_visibility(setup, {0}, s.v_dephase));
    auto three_setup = setup;
    three_setup.observables = pathcalc::Observables::three_fold_referenced;
    rep.add("V_threefold_analytic", analytic_visibility(three_setup, {1, 1}, 1.0));
    rep.add("V_threefold_model", analytic_visibility(three_setup, {1, 1}, s.v_dephase));
    files["scan.csv"] = scan_text(threefold);
    files["scan_twofold.csv"] = scan_text(twofold);
  }
  add_histogram_files(files, s, total, T, seed);
  files["report.txt"] = rep.text();
  return files;
}

std::string manifest(const Scenario& s, std::optional<std::uint64_t> seed, const Files& files) {
  io::Report m;
  m.add("program", "pairsim");
  m.add("version", version);
  m.add("kind", kind_name(s.kind));
  m.add("seed", seed ? std::to_string(*seed) : std::string("none"));
  m.add("config_digest", s.digest);
  for (const auto& [name, content] : files) m.add("file." + name, hex64(fnv1a64(content)));
  return m.text();
}

}  // namespace

const char* kind_name(Kind kind) noexcept {
  switch (kind) {
    case Kind::cw_coincidence: return "cw_coincidence";
    case Kind::pulsed_coincidence: return "pulsed_coincidence";
    case Kind::franson: return "franson";
    case Kind::timebin: return "timebin";
    case Kind::qpm_design: return "qpm_design";
  }
  return "unknown";
}

double Scenario::detection(int arm) const {
  const auto i = static_cast<std::size_t>(arm);
  return transmission[i] * detectors[i].efficiency;
}

pathcalc::Setup Scenario::setup(double alice_phase) const {
  pathcalc::Setup st;
  st.pump = source.mode == source::PumpMode::pulsed ? pathcalc::PumpCoherence::pulsed
                                                    : pathcalc::PumpCoherence::continuous;
  st.pump_interferometer = pump_interferometer;
  st.alice = alice;
  st.alice.phase = alice.phase + alice_phase;
  st.bob = bob;
  st.port_a = port_a;
  st.port_b = port_b;
  st.v_dephase = v_dephase;
  return st;
}

QpmDesign qpm_from_config(const Config& cfg) {
  QpmDesign q;
  q.model = cfg.get_string("qpm.model", q.model);
  q.model_params = cfg.get_list("qpm.params");
  q.temperature = cfg.get_double("qpm.temperature_c", q.temperature);
  q.pump = positive(cfg, "qpm.pump_nm", q.pump / units::nm) * units::nm;
  q.signal = positive(cfg, "qpm.signal_nm", 2.0 * q.pump / units::nm) * units::nm;
  q.length = positive(cfg, "qpm.length_mm", q.length / units::mm) * units::mm;
  if (cfg.has("qpm.period_um")) q.period = cfg.require_double("qpm.period_um") * units::um;
  q.grid_start = positive(cfg, "qpm.grid_start_nm", q.signal / units::nm - 120.0) * units::nm;
  q.grid_stop = positive(cfg, "qpm.grid_stop_nm", q.signal / units::nm + 120.0) * units::nm;
  const auto points = cfg.get_int("qpm.grid_points", static_cast<std::int64_t>(q.grid_points));
  if (points < 3) cfg.fail("qpm.grid_points", "need at least 3 points");
  if (!(q.grid_stop > q.grid_start)) cfg.fail("qpm.grid_stop_nm", "must exceed qpm.grid_start_nm");
  q.grid_points = static_cast<std::size_t>(points);
  try {
    qpm::model_by_name(q.model, q.model_params);
  } catch (const Error& e) {
    cfg.fail("qpm.model", e.what());
  }
  return q;
}

Scenario Scenario::from_config(const Config& cfg) {
  Scenario s;
  s.kind = parse_kind(cfg);
  if (cfg.has("seed")) s.seed = cfg.require_uint("seed");
  s.digest = hex64(fnv1a64(cfg.canonical_text()));

  if (s.kind == Kind::qpm_design) {
    s.qpm = qpm_from_config(cfg);
    cfg.reject_unused();
    return s;
  }

  const bool interferometric = s.kind == Kind::franson || s.kind == Kind::timebin;
  const auto mode = cfg.get_string("source.mode", s.kind == Kind::pulsed_coincidence ||
                                                          s.kind == Kind::timebin
                                                      ? "pulsed"
                                                      : "cw");
  if (mode == "cw") {
    s.source.mode = source::PumpMode::cw;
  } else if (mode == "pulsed") {
    s.source.mode = source::PumpMode::pulsed;
  } else {
    cfg.fail("source.mode", "expected cw or pulsed");
  }
  if (s.kind == Kind::timebin && s.source.mode != source::PumpMode::pulsed)
    cfg.fail("source.mode", "time-bin entanglement needs a pulsed pump");
  if ((s.kind == Kind::cw_coincidence || s.kind == Kind::franson) &&
      s.source.mode != source::PumpMode::cw)
    cfg.fail("source.mode", std::string(kind_name(s.kind)) + " needs a cw pump");

  if (!cfg.has("source.efficiency")) cfg.fail("source.efficiency", "required key is missing");
  s.source.efficiency = positive(cfg, "source.efficiency", 0.0);
  if (s.source.efficiency >= 1e-2) cfg.fail("source.efficiency", "must be below 1e-2");
  s.source.pump_wavelength = positive(cfg, "source.pump_wavelength_nm", 657.0) * units::nm;
  s.source.repetition_rate = positive(cfg, "source.repetition_rate_mhz", 80.0) * units::MHz;
  s.source.pulse_duration = non_negative(cfg, "source.pulse_duration_ns", 0.4) * ns;
  if (s.source.pulse_duration >= s.source.period())
    cfg.fail("source.pulse_duration_ns", "must be shorter than the pulse period");

  const bool has_power = cfg.has("source.pump_power_uw");
  const bool has_mu = cfg.has("source.mu");
  if (has_power == has_mu)
    cfg.fail(has_mu ? "source.mu" : "source.pump_power_uw",
             "give exactly one of source.pump_power_uw and source.mu");
  if (has_power) {
    s.source.pump_power = positive(cfg, "source.pump_power_uw", 1.0) * units::uW;
  } else {
    if (s.source.mode != source::PumpMode::pulsed) cfg.fail("source.mu", "only for a pulsed pump");
    const double mu = positive(cfg, "source.mu", 1.0);
    // Mean power that yields mu pairs per pulse.
    s.source.pump_power = mu * s.source.repetition_rate * planck * speed_of_light /
                          (s.source.efficiency * s.source.pump_wavelength);
  }

  const auto stats = cfg.get_string("source.statistics", "poisson");
  if (stats == "poisson") {
    s.source.statistics = source::PairStatistics::poisson;
  } else if (stats == "thermal") {
    s.source.statistics = source::PairStatistics::thermal;
  } else {
    cfg.fail("source.statistics", "expected poisson or thermal");
  }
  const auto routing = cfg.get_string(
      "source.routing", s.kind == Kind::pulsed_coincidence || s.kind == Kind::timebin
                            ? "deterministic"
                            : "beamsplitter");
  if (routing == "beamsplitter") {
    s.routing = source::Routing::beamsplitter;
  } else if (routing == "deterministic") {
    s.routing = source::Routing::deterministic;
  } else {
    cfg.fail("source.routing", "expected beamsplitter or deterministic");
  }

  s.transmission[0] = probability(cfg, "arm1.transmission", 1.0);
  s.transmission[1] = probability(cfg, "arm2.transmission", 1.0);
  s.detectors[0] = read_detector(cfg, "detector1");
  s.detectors[1] = read_detector(cfg, "detector2");

  s.tac_range = positive(cfg, "tac.range_ns", 60.0) * ns;
  s.tac_bin = positive(cfg, "tac.bin_ns", 0.1) * ns;
  if (s.tac_bin >= s.tac_range) cfg.fail("tac.bin_ns", "must be smaller than tac.range_ns");
  s.stop_delay = cfg.get_double("tac.stop_delay_ns", 5.0) * ns;
  if (!std::isfinite(s.stop_delay)) cfg.fail("tac.stop_delay_ns", "must be finite");

  const double imbalance = positive(cfg, "interferometer.imbalance_ns", 1.0) * ns;
  const double default_width = interferometric ? 0.8 * imbalance : 2.0 * ns;
  s.window.center = cfg.get_double("window.center_ns", s.stop_delay / ns) * ns;
  s.window.width = positive(cfg, "window.width_ns", default_width / ns) * ns;
  if (s.window.low() < 0.0 || s.window.high() > s.tac_range)
    cfg.fail("window.center_ns", "coincidence window must lie inside the TAC range");

  if (s.source.mode == source::PumpMode::cw) {
    s.duration = positive(cfg, "run.duration_ns", 1e9) * ns;
  } else {
    s.pulses = cfg.get_int("run.pulses", s.pulses);
    if (s.pulses <= 0) cfg.fail("run.pulses", "must be positive");
  }

  s.write_events = cfg.get_bool("output.events", false);

  if (interferometric) {
    s.alice = read_interferometer(cfg, "alice", imbalance);
    s.bob = read_interferometer(cfg, "bob", imbalance);
    s.port_a = read_port(cfg, "alice.port", 0);
    s.port_b = read_port(cfg, "bob.port", s.kind == Kind::timebin ? 1 : 0);
    s.v_dephase = probability(cfg, "v_dephase", 1.0);
    if (s.kind == Kind::timebin) {
      s.pump_interferometer = read_interferometer(cfg, "pump_interferometer", imbalance);
      const double ref_center =
          cfg.get_double("timebin.reference_center_ns",
                         (imbalance + 0.5 * s.source.pulse_duration) / ns) * ns;
      const double ref_width =
          positive(cfg, "timebin.reference_width_ns", 0.6 * imbalance / ns) * ns;
      s.reference_a = {ref_center, ref_width};
      s.reference_b = {ref_center, ref_width};
    } else {
      s.accidental_ratio = non_negative(cfg, "franson.accidental_ratio", 0.0);
    }

    s.phases = cfg.get_list("scan.phases_rad");
    if (s.phases.empty()) {
      const auto points = cfg.get_int("scan.points", 16);
      if (points < 4) cfg.fail("scan.points", "need at least 4 phase points");
      for (std::int64_t i = 0; i < points; ++i)
        s.phases.push_back(two_pi * static_cast<double>(i) / static_cast<double>(points));
    } else if (s.phases.size() < 4) {
      cfg.fail("scan.phases_rad", "need at least 4 phase points");
    }
    // Per-point acquisition replaces the run length.
    if (s.source.mode == source::PumpMode::cw) {
      s.duration = positive(cfg, "scan.duration_ns", s.duration / ns) * ns;
    } else {
      s.pulses = cfg.get_int("scan.pulses", s.pulses);
      if (s.pulses <= 0) cfg.fail("scan.pulses", "must be positive");
    }
    try {
      s.setup(0.0).validate();
    } catch (const Error& e) {
      cfg.fail("interferometer.imbalance_ns", e.what());
    }
  }

  try {
    s.source.validate();
  } catch (const Error& e) {
    cfg.fail("source.efficiency", e.what());
  }
  cfg.reject_unused();
  return s;
}

Scenario parse(const std::string& text, const std::string& origin) {
  return Scenario::from_config(Config::parse(text, origin));
}

Scenario load(const std::string& path) { return Scenario::from_config(Config::load(path)); }

Files run(const Scenario& s, std::optional<std::uint64_t> seed_override) {
  Files files;
  std::optional<std::uint64_t> seed;
  if (s.kind == Kind::qpm_design) {
    files = qpm_design(s.qpm);
  } else {
    seed = require_seed(s, seed_override);
    switch (s.kind) {
      case Kind::cw_coincidence: files = run_cw(s, *seed); break;
      case Kind::pulsed_coincidence: files = run_pulsed(s, *seed); break;
      default: files = run_interference(s, *seed); break;
    }
  }
  files["manifest.txt"] = manifest(s, seed, files);
  return files;
}

void write_files(const Files& files, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(Errc::io, "cannot create output directory '" + directory + "': " + ec.message());
  for (const auto& [name, content] : files)
    io::write_file((std::filesystem::path(directory) / name).string(), content);
}

std::string analyze_text(const std::string& content, const std::string& name,
                         const AnalyzeOptions& options) {
  std::istringstream in(content);
  const auto header = content.substr(0, content.find('\n'));
  io::Report rep;
  if (header.rfind("bin_start_ns,counts", 0) == 0) {
    auto h = io::read_histogram_csv(in, name);
    h.starts = options.starts;
    rep.add("input", "histogram");
    rep.add("bins", static_cast<std::uint64_t>(h.counts.size()));
    rep.add("total_counts", h.total());
    std::vector<double> values;
    if (options.pileup_correction && h.starts > 0) {
      values = analyze::correct_pileup(h);
    } else {
      for (auto c : h.counts) values.push_back(static_cast<double>(c));
    }
    rep.add("pileup_corrected", options.pileup_correction && h.starts > 0);
    analyze::PeakSet peaks;
    peaks.expected_spacing = options.spacing;
    if (!h.counts.empty()) peaks = analyze::find_peaks(values, h.origin, h.bin_width, options.spacing);
    rep.add("peaks", static_cast<std::uint64_t>(peaks.peaks.size()));
    if (peaks.empty()) {
      rep.add("no_peaks", true);
      return rep.text();
    }
    std::vector<double> pos, area;
    for (const auto& p : peaks.peaks) {
      pos.push_back(p.position);
      area.push_back(p.area);
    }
    rep.add("peak_positions_ns", join(pos, ns));
    rep.add("peak_areas", join(area, 1.0));
    rep.add("peak_spacing_ns", peaks.mean_spacing() / ns);
    if (peaks.peaks.size() >= 2) {
      const auto mu = analyze::infer_mu(peaks, options.splitting);
      rep.add("r", mu.ratio);
      rep.add("mu", mu.mu);
    }
    return rep.text();
  }
  if (header.rfind("phase_rad,counts", 0) == 0) {
    const auto scan = io::read_scan_csv(in, name);
    const auto raw = analyze::fit_visibility(scan);
    rep.add("input", "scan");
    rep.add("points", static_cast<std::uint64_t>(scan.size()));
    add_fit(rep, "raw", raw);
    rep.add("phase_offset_rad", raw.phase_offset);
    if (options.singles_1 > 0.0 && options.singles_2 > 0.0 && options.window > 0.0 &&
        options.duration > 0.0) {
      const auto net = analyze::subtract_accidentals(scan, options.singles_1, options.singles_2,
                                                     options.window, options.duration);
      add_fit(rep, "net", net.fit);
      rep.add("accidentals_per_point", net.accidental_counts);
    }
    add_bell(rep, raw);
    return rep.text();
  }
  throw Error(Errc::parse, name + ":1: unrecognised header; expected 'bin_start_ns,counts' or "
                                  "'phase_rad,counts'");
}

std::string analyze_file(const std::string& path, const AnalyzeOptions& options) {
  AnalyzeOptions opts = options;
  const auto dot = path.rfind(".csv");
  if (opts.starts == 0 && dot != std::string::npos && dot + 4 == path.size()) {
    const std::string sidecar = path.substr(0, dot) + ".meta";
    if (std::ifstream(sidecar))
      opts.starts = io::parse_histogram_meta(io::read_file(sidecar), sidecar).starts;
  }
  return analyze_text(io::read_file(path), path, opts);
}

Files qpm_design(const QpmDesign& q) {
  const auto model = qpm::model_by_name(q.model, q.model_params);
  qpm::PolingSpec spec;
  spec.length = q.length;
  spec.temperature = q.temperature;
  spec.period = q.period ? *q.period
                         : qpm::solve_poling_period(model, q.pump, q.signal, q.temperature);
  const double residual = qpm::phase_mismatch(model, spec, q.pump, q.signal);
  const auto grid = qpm::linear_grid(q.grid_start, q.grid_stop, q.grid_points);
  const auto spectrum = qpm::pdc_spectrum(model, spec, q.pump, grid);

  double peak = 0.0;
  for (const auto& p : spectrum.points) peak = std::max(peak, p.intensity);

  io::Report rep;
  rep.add("kind", "qpm_design");
  rep.add("model", model.name());
  rep.add("index_offset", model.index_offset());
  rep.add("temperature_c", q.temperature);
  rep.add("pump_nm", q.pump / units::nm);
  rep.add("signal_nm", q.signal / units::nm);
  rep.add("idler_nm", qpm::conjugate_wavelength(q.pump, q.signal) / units::nm);
  rep.add("period_um", spec.period / units::um);
  rep.add("residual_rad_per_m", residual);
  rep.add("length_mm", q.length / units::mm);
  rep.add("peak_intensity", peak);
  rep.add("fwhm_nm", spectrum.fwhm / units::nm);

  std::ostringstream csv;
  qpm::write_spectrum_csv(csv, spectrum.points);
  return {{"report.txt", rep.text()}, {"spectrum.csv", csv.str()}};
}

}  // namespace pairsim::scenario
