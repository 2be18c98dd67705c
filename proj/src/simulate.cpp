#include "pairsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pairsim/error.hpp"

namespace pairsim::simulate {

namespace {

constexpr std::uint64_t stream_outcome = 0x51a70001;
constexpr std::uint64_t stream_detector = 0x51a70002;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void add(std::vector<PairOutcome>& out, double probability, std::initializer_list<Hit> hits) {
  if (!(probability > 0.0)) return;
  PairOutcome o;
  o.probability = probability;
  for (const auto& h : hits) o.hits[static_cast<std::size_t>(o.count++)] = h;
  out.push_back(o);
}

// Single-photon arrival distribution at one analyzer port, keyed by slot.
// Emission from different pump routes is told apart by the twin, so routes add
// in probability.
std::map<int, double> marginal(const pathcalc::Pump& pump,
                               const std::vector<pathcalc::PhotonPath>& paths) {
  std::map<int, double> m;
  for (const auto& p : pump.paths)
    for (const auto& a : paths) {
      const int slot = pump.coherence == pathcalc::PumpCoherence::pulsed ? p.slots + a.slots
                                                                         : a.slots;
      m[slot] += std::norm(p.amplitude) * std::norm(a.amplitude);
    }
  return m;
}

double total(const std::map<int, double>& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

// Arrivals of one photon whose twin is not at the monitored port.
std::map<int, double> lone_arrivals(const std::map<int, double>& marg,
                                    const std::map<int, double>& joint, bool per_slot) {
  std::map<int, double> out;
  if (per_slot) {
    for (const auto& [slot, p] : marg) {
      auto it = joint.find(slot);
      out[slot] = std::max(0.0, p - (it == joint.end() ? 0.0 : it->second));
    }
    return out;
  }
  const double m = total(marg);
  const double lone = std::max(0.0, m - total(joint));
  if (m > 0.0)
    for (const auto& [slot, p] : marg) out[slot] = lone * p / m;
  return out;
}

}  // namespace

OutcomeModel::OutcomeModel(std::vector<PairOutcome> outcomes) : outcomes_(std::move(outcomes)) {
  double sum = 0.0;
  for (const auto& o : outcomes_) {
    if (!(o.probability >= 0.0) || o.count < 1 || o.count > 2)
      throw Error(Errc::invalid_argument, "malformed pair outcome");
    sum += o.probability;
    cumulative_.push_back(sum);
  }
  if (sum > 1.0 + 1e-9) throw Error(Errc::invalid_argument, "outcome probabilities exceed one");
  visible_ = std::min(sum, 1.0);
}

const PairOutcome& OutcomeModel::sample(Rng& rng) const {
  if (outcomes_.empty()) throw Error(Errc::invalid_argument, "outcome model is empty");
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return outcomes_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double OutcomeModel::mean_hits(int detector) const {
  double n = 0.0;
  for (const auto& o : outcomes_)
    for (int i = 0; i < o.count; ++i)
      if (o.hits[static_cast<std::size_t>(i)].detector == detector) n += o.probability;
  return n;
}

double OutcomeModel::coincidence_probability(int slot_difference) const {
  double p = 0.0;
  for (const auto& o : outcomes_) {
    if (o.count != 2 || o.hits[0].detector == o.hits[1].detector) continue;
    const auto& start = o.hits[0].detector == 0 ? o.hits[0] : o.hits[1];
    const auto& stop = o.hits[0].detector == 0 ? o.hits[1] : o.hits[0];
    if (stop.slots - start.slots == slot_difference) p += o.probability;
  }
  return p;
}

OutcomeModel coincidence_model(source::Routing routing, double detect_1, double detect_2) {
  if (!is_probability(detect_1) || !is_probability(detect_2))
    throw Error(Errc::invalid_argument, "detection probabilities must lie in [0, 1]");
  std::vector<PairOutcome> out;
  if (routing == source::Routing::deterministic) {
    add(out, detect_1 * detect_2, {{0, 0}, {1, 0}});
    add(out, detect_1 * (1.0 - detect_2), {{0, 0}});
    add(out, (1.0 - detect_1) * detect_2, {{1, 0}});
    return OutcomeModel(std::move(out));
  }
  // Each photon independently: arm 1 detected, arm 2 detected, or lost.
  const double p1 = 0.5 * detect_1;
  const double p2 = 0.5 * detect_2;
  const double none = 1.0 - p1 - p2;
  add(out, p1 * p1, {{0, 0}, {0, 0}});
  add(out, p2 * p2, {{1, 0}, {1, 0}});
  add(out, 2.0 * p1 * p2, {{0, 0}, {1, 0}});
  add(out, 2.0 * p1 * none, {{0, 0}});
  add(out, 2.0 * p2 * none, {{1, 0}});
  return OutcomeModel(std::move(out));
}

OutcomeModel interference_model(const pathcalc::Setup& setup, source::Routing routing,
                                double detect_1, double detect_2) {
  if (!is_probability(detect_1) || !is_probability(detect_2))
    throw Error(Errc::invalid_argument, "detection probabilities must lie in [0, 1]");
  setup.validate();
  const auto pump = setup.make_pump();
  const auto paths_a = pathcalc::propagate(setup.alice, setup.port_a, "A");
  const auto paths_b = pathcalc::propagate(setup.bob, setup.port_b, "B");
  const auto groups = pathcalc::coherent_groups(pump, paths_a, paths_b, setup.v_dephase);
  const bool pulsed = pump.coherence == pathcalc::PumpCoherence::pulsed;

  std::map<int, double> joint_a, joint_b;
  for (const auto& g : groups) {
    joint_a[g.slots_a] += g.probability;
    joint_b[g.slots_b] += g.probability;
  }
  const auto marg_a = marginal(pump, paths_a);
  const auto marg_b = marginal(pump, paths_b);
  const auto lone_a = lone_arrivals(marg_a, joint_a, pulsed);
  const auto lone_b = lone_arrivals(marg_b, joint_b, pulsed);

  const double split = routing == source::Routing::deterministic ? 1.0 : 0.5;
  std::vector<PairOutcome> out;
  for (const auto& g : groups) {
    const double q = split * g.probability;
    add(out, q * detect_1 * detect_2, {{0, g.slots_a}, {1, g.slots_b}});
    add(out, q * detect_1 * (1.0 - detect_2), {{0, g.slots_a}});
    add(out, q * (1.0 - detect_1) * detect_2, {{1, g.slots_b}});
  }
  for (const auto& [slot, p] : lone_a) add(out, split * p * detect_1, {{0, slot}});
  for (const auto& [slot, p] : lone_b) add(out, split * p * detect_2, {{1, slot}});

  if (routing == source::Routing::beamsplitter) {
    // Both photons in one analyzer: each takes its own route, but both share
    // the pump route that created them.
    auto same_side = [&](const std::vector<pathcalc::PhotonPath>& paths, int detector,
                         double eta) {
      for (const auto& p : pump.paths) {
        const double wp = pulsed ? std::norm(p.amplitude) : 1.0;
        const int shift = pulsed ? p.slots : 0;
        double seen = 0.0;
        for (const auto& a : paths) seen += std::norm(a.amplitude);
        const double q = 0.25 * wp;
        for (const auto& a : paths) {
          const double pa = std::norm(a.amplitude) * eta;
          for (const auto& b : paths) {
            const double pb = std::norm(b.amplitude) * eta;
            add(out, q * pa * pb, {{detector, shift + a.slots}, {detector, shift + b.slots}});
          }
          add(out, 2.0 * q * pa * (1.0 - seen * eta), {{detector, shift + a.slots}});
        }
        if (!pulsed) break;
      }
    };
    same_side(paths_a, 0, detect_1);
    same_side(paths_b, 1, detect_2);
  }
  return OutcomeModel(std::move(out));
}

PipelineResult run_pipeline(const PipelineSpec& spec, const OutcomeModel& model) {
  spec.source.validate();
  for (const auto& d : spec.detectors) d.validate();
  if (!(spec.slot > 0.0)) throw Error(Errc::invalid_argument, "slot duration must be positive");

  const double keep = model.visible_probability();
  const bool pulsed = spec.source.mode == source::PumpMode::pulsed;
  if (pulsed && spec.pulses < 0) throw Error(Errc::invalid_argument, "pulse count must be >= 0");
  if (!pulsed && !(spec.duration >= 0.0))
    throw Error(Errc::invalid_argument, "duration must be non-negative");
  auto stream = pulsed ? source::EmissionStream::pulsed(spec.source, spec.pulses, spec.seed, keep)
                       : source::EmissionStream::cw(spec.source, spec.duration, spec.seed, keep);

  std::array<detect::Detector, 2> detectors{
      detect::Detector({1.0, spec.detectors[0].dark_rate, spec.detectors[0].dead_time,
                        spec.detectors[0].jitter},
                       derive_seed(spec.seed, stream_detector, 0)),
      detect::Detector({1.0, spec.detectors[1].dark_rate, spec.detectors[1].dead_time,
                        spec.detectors[1].jitter},
                       derive_seed(spec.seed, stream_detector, 1))};
  detect::TacAccumulator tac(spec.tac_range, spec.tac_bin, spec.stop_delay,
                             spec.keep_coincidences);

  PipelineResult result;
  result.duration = stream.end_time();

  std::vector<source::PairEvent> block;
  std::array<std::vector<detect::Arrival>, 2> pending, ready;
  std::array<std::vector<detect::DetectionEvent>, 2> detected;
  auto by_time = [](const detect::Arrival& x, const detect::Arrival& y) { return x.time < y.time; };

  auto feed = [&](double until, bool last) {
    for (std::size_t d = 0; d < 2; ++d) {
      auto& p = pending[d];
      std::sort(p.begin(), p.end(), by_time);
      auto split = last ? p.end()
                        : std::lower_bound(p.begin(), p.end(), until,
                                           [](const detect::Arrival& a, double t) { return a.time < t; });
      ready[d].assign(p.begin(), split);
      p.erase(p.begin(), split);
      detected[d].clear();
      detectors[d].process(ready[d], until, detected[d]);
      if (last) detectors[d].finish(detected[d]);
      result.singles[d] += detected[d].size();
    }
    tac.add_starts(detected[0]);
    tac.add_stops(detected[1]);
    if (last) {
      tac.finish();
    } else {
      tac.advance(std::min(until - 8.0 * spec.detectors[0].jitter,
                           until - 8.0 * spec.detectors[1].jitter));
    }
  };

  std::uint64_t block_index = 0;
  while (stream.next(block)) {
    Rng rng(derive_seed(spec.seed, stream_outcome, block_index++));
    for (const auto& e : block) {
      const auto& o = model.sample(rng);
      ++result.visible_pairs;
      for (int i = 0; i < o.count; ++i) {
        const auto& h = o.hits[static_cast<std::size_t>(i)];
        const double t = e.time + h.slots * spec.slot;
        pending[static_cast<std::size_t>(h.detector)].push_back(
            {t, static_cast<std::int64_t>(e.pair_id), h.slots});
        if (spec.record_arrivals) {
          auto& arm = h.detector == 0 ? result.arrivals.arm1 : result.arrivals.arm2;
          arm.push_back({t, e.pulse_index, e.pair_id, i});
        }
      }
    }
    feed(stream.watermark(), false);
    if (spec.keep_coincidences) {
      auto& c = tac.coincidences();
      result.coincidences.insert(result.coincidences.end(), c.begin(), c.end());
      tac.clear_coincidences();
    }
  }
  // Delayed photons may trail the last emission.
  double tail = result.duration;
  for (const auto& p : pending)
    for (const auto& a : p) tail = std::max(tail, std::nextafter(a.time, 1e300));
  feed(tail, true);
  if (spec.keep_coincidences) {
    auto& c = tac.coincidences();
    result.coincidences.insert(result.coincidences.end(), c.begin(), c.end());
  }
  if (spec.record_arrivals) {
    auto order = [](const source::Photon& x, const source::Photon& y) { return x.time < y.time; };
    std::stable_sort(result.arrivals.arm1.begin(), result.arrivals.arm1.end(), order);
    std::stable_sort(result.arrivals.arm2.begin(), result.arrivals.arm2.end(), order);
  }
  result.histogram = tac.histogram();
  return result;
}

}  // namespace pairsim::simulate
