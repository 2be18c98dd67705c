#include "pairsim/pathcalc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "pairsim/error.hpp"
#include "pairsim/units.hpp"

namespace pairsim::pathcalc {

namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

std::string join_label(const std::string& p, const std::string& a, const std::string& b) {
  std::string out;
  for (const auto* part : {&p, &a, &b}) {
    if (part->empty()) continue;
    if (!out.empty()) out += '-';
    out += *part;
  }
  return out;
}

// Common imbalance of all paths with a nonzero slot count; 0 if none.
double common_imbalance(std::span<const PhotonPath> a, std::span<const PhotonPath> b,
                        std::span<const PhotonPath> c) {
  double unit = 0.0;
  for (auto list : {a, b, c}) {
    for (const auto& path : list) {
      if (path.slots < 0 || path.delay < 0.0)
        throw Error(Errc::invalid_argument, "path '" + path.label + "' has a negative delay");
      if (path.slots == 0) continue;
      const double u = path.delay / path.slots;
      if (unit == 0.0) {
        unit = u;
      } else if (std::abs(u - unit) > 1e-9 * unit) {
        throw Error(Errc::invalid_argument,
                    "interferometer imbalances differ; only equally unbalanced analyzers are "
                    "supported");
      }
    }
  }
  return unit;
}

void check_paths(std::span<const PhotonPath> paths, const char* what) {
  if (paths.empty()) throw Error(Errc::invalid_argument, std::string(what) + " path list is empty");
  for (const auto& p : paths) {
    if (!std::isfinite(std::abs(p.amplitude)) || std::abs(p.amplitude) > 1.0 + 1e-12)
      throw Error(Errc::invalid_argument, std::string(what) + " path amplitude exceeds 1");
  }
}

}  // namespace

void InterferometerSpec::validate() const {
  if (!(std::isfinite(imbalance) && imbalance > 0.0))
    throw Error(Errc::invalid_argument, "interferometer imbalance must be positive");
  if (!std::isfinite(phase)) throw Error(Errc::invalid_argument, "interferometer phase must be finite");
  if (!is_probability(transmission_short) || !is_probability(transmission_long))
    throw Error(Errc::invalid_argument, "arm transmissions must lie in [0, 1]");
  if (!is_probability(loss)) throw Error(Errc::invalid_argument, "loss must lie in [0, 1]");
}

double imbalance_from_fiber(double length_difference, double group_index) {
  return length_difference * group_index / speed_of_light;
}

std::vector<PhotonPath> propagate(const InterferometerSpec& spec, int output_port,
                                  std::string_view tag) {
  spec.validate();
  if (output_port != 0 && output_port != 1)
    throw Error(Errc::invalid_argument, "output port must be 0 or 1");

  const double pass = std::sqrt(spec.loss);
  const double long_phase = spec.phase + (output_port == 1 ? std::numbers::pi : 0.0);
  const std::string suffix = tag.empty() ? std::string() : "_" + std::string(tag);

  PhotonPath short_path{0.0, 0, 0.0, {0.5 * spec.transmission_short * pass, 0.0}, "s" + suffix};
  PhotonPath long_path{spec.imbalance, 1, long_phase,
                       std::polar(0.5 * spec.transmission_long * pass, long_phase), "l" + suffix};
  return {short_path, long_path};
}

Pump cw_pump() {
  return {PumpCoherence::continuous, {PhotonPath{0.0, 0, 0.0, {1.0, 0.0}, ""}}};
}

Pump pulsed_pump() {
  return {PumpCoherence::pulsed, {PhotonPath{0.0, 0, 0.0, {1.0, 0.0}, "P"}}};
}

Pump pulsed_pump(const InterferometerSpec& spec) {
  spec.validate();
  const double scale = std::sqrt(spec.loss) / std::numbers::sqrt2;
  PhotonPath s{0.0, 0, 0.0, {spec.transmission_short * scale, 0.0}, "s_P"};
  PhotonPath l{spec.imbalance, 1, spec.phase, std::polar(spec.transmission_long * scale, spec.phase),
               "l_P"};
  return {PumpCoherence::pulsed, {s, l}};
}

std::vector<CoherentGroup> coherent_groups(const Pump& pump, std::span<const PhotonPath> paths_a,
                                           std::span<const PhotonPath> paths_b, double v_dephase) {
  check_paths(pump.paths, "pump");
  check_paths(paths_a, "analyzer A");
  check_paths(paths_b, "analyzer B");
  if (!is_probability(v_dephase)) throw Error(Errc::invalid_argument, "v_dephase must lie in [0, 1]");
  common_imbalance(pump.paths, paths_a, paths_b);

  struct Accum {
    std::complex<double> amplitude{0.0, 0.0};
    double incoherent = 0.0;
    std::vector<std::string> labels;
  };
  std::map<std::pair<int, int>, Accum> groups;

  for (const auto& p : pump.paths) {
    for (const auto& a : paths_a) {
      for (const auto& b : paths_b) {
        std::pair<int, int> key;
        if (pump.coherence == PumpCoherence::continuous) {
          const int d = a.slots - b.slots;
          key = {std::max(d, 0), std::max(-d, 0)};
        } else {
          key = {p.slots + a.slots, p.slots + b.slots};
        }
        const auto amp = p.amplitude * a.amplitude * b.amplitude;
        auto& g = groups[key];
        g.amplitude += amp;
        g.incoherent += std::norm(amp);
        g.labels.push_back(join_label(p.label, a.label, b.label));
      }
    }
  }

  std::vector<CoherentGroup> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    const double cross = std::norm(g.amplitude) - g.incoherent;
    const double prob = std::max(0.0, g.incoherent + v_dephase * cross);
    out.push_back({key.first, key.second, prob, std::move(g.labels)});
  }
  return out;
}

std::vector<JointOutcome> joint_outcomes(const Pump& pump, std::span<const PhotonPath> paths_a,
                                         std::span<const PhotonPath> paths_b,
                                         Observables observables, double v_dephase) {
  if (observables == Observables::three_fold_referenced &&
      pump.coherence == PumpCoherence::continuous)
    throw Error(Errc::invalid_argument,
                "three-fold referenced binning needs a pulsed pump as time reference");

  const double unit = common_imbalance(pump.paths, paths_a, paths_b);
  const auto groups = coherent_groups(pump, paths_a, paths_b, v_dephase);

  std::map<BinKey, JointOutcome> bins;
  for (const auto& g : groups) {
    BinKey key = observables == Observables::two_fold_difference
                     ? BinKey{g.slots_a - g.slots_b}
                     : BinKey{g.slots_a, g.slots_b};
    auto& out = bins[key];
    out.key = key;
    out.probability += g.probability;
    out.contributing_labels.insert(out.contributing_labels.end(), g.labels.begin(), g.labels.end());
  }

  std::vector<JointOutcome> result;
  result.reserve(bins.size());
  for (auto& [key, outcome] : bins) {
    outcome.time_signature.clear();
    for (int k : key) outcome.time_signature.push_back(k * unit);
    result.push_back(std::move(outcome));
  }
  return result;
}

std::vector<JointOutcome> joint_outcomes(std::span<const PhotonPath> pump_paths,
                                         std::span<const PhotonPath> paths_a,
                                         std::span<const PhotonPath> paths_b,
                                         Observables observables, double v_dephase) {
  Pump pump;
  pump.coherence = pump_paths.size() == 1 ? PumpCoherence::continuous : PumpCoherence::pulsed;
  pump.paths.assign(pump_paths.begin(), pump_paths.end());
  return joint_outcomes(pump, paths_a, paths_b, observables, v_dephase);
}

Pump Setup::make_pump() const {
  if (pump == PumpCoherence::continuous) {
    if (pump_interferometer)
      throw Error(Errc::invalid_argument, "a continuous pump takes no pump interferometer");
    return cw_pump();
  }
  return pump_interferometer ? pulsed_pump(*pump_interferometer) : pulsed_pump();
}

void Setup::validate() const {
  alice.validate();
  bob.validate();
  if (pump_interferometer) pump_interferometer->validate();
  if (!is_probability(v_dephase)) throw Error(Errc::invalid_argument, "v_dephase must lie in [0, 1]");
}

std::vector<JointOutcome> joint_outcomes(const Setup& setup) {
  setup.validate();
  const auto a = propagate(setup.alice, setup.port_a, "A");
  const auto b = propagate(setup.bob, setup.port_b, "B");
  return joint_outcomes(setup.make_pump(), a, b, setup.observables, setup.v_dephase);
}

std::vector<ScanValue> visibility_scan(const Setup& setup, std::span<const double> phases,
                                       const BinKey& key) {
  std::vector<ScanValue> out;
  out.reserve(phases.size());
  Setup s = setup;
  for (double phase : phases) {
    s.alice.phase = phase;
    const auto outcomes = joint_outcomes(s);
    auto it = std::find_if(outcomes.begin(), outcomes.end(),
                           [&](const JointOutcome& o) { return o.key == key; });
    if (it == outcomes.end()) {
      std::string text;
      for (int k : key) text += (text.empty() ? "" : ",") + std::to_string(k);
      throw Error(Errc::lookup, "no outcome with bin key (" + text + ")");
    }
    out.push_back({phase, it->probability});
  }
  return out;
}

double fringe_visibility(std::span<const ScanValue> scan) {
  if (scan.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(scan.begin(), scan.end(), [](auto& x, auto& y) {
    return x.probability < y.probability;
  });
  const double sum = hi->probability + lo->probability;
  return sum > 0.0 ? (hi->probability - lo->probability) / sum : 0.0;
}

}  // namespace pairsim::pathcalc
