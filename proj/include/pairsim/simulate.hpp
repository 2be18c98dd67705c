#pragma once

// Monte-Carlo pipeline: pair emission -> per-pair detection outcome ->
// detectors -> start-stop converter. Interferometric setups enter through the
// outcome model, which folds path amplitudes, routing and detection
// probabilities into a small table sampled once per pair.

#include <array>
#include <cstdint>
#include <vector>

#include "pairsim/detect.hpp"
#include "pairsim/pathcalc.hpp"
#include "pairsim/random.hpp"
#include "pairsim/source.hpp"

namespace pairsim::simulate {

struct Hit {
  int detector = 0;  ///< 0 starts the converter, 1 stops it
  int slots = 0;     ///< delay in units of the interferometer imbalance
};

struct PairOutcome {
  std::array<Hit, 2> hits{};
  int count = 0;  ///< hits used, 1 or 2
  double probability = 0.0;
};

/// Distribution of the detected part of one pair. The probability of no
/// detection at all is implicit.
class OutcomeModel {
 public:
  OutcomeModel() = default;
  explicit OutcomeModel(std::vector<PairOutcome> outcomes);

  /// Probability that at least one photon of the pair is detected.
  double visible_probability() const noexcept { return visible_; }
  /// Draw conditioned on at least one detection.
  const PairOutcome& sample(Rng& rng) const;
  const std::vector<PairOutcome>& outcomes() const noexcept { return outcomes_; }

  /// Expected detections per pair on `detector`.
  double mean_hits(int detector) const;
  /// Probability of a start and a stop from the same pair whose slot
  /// difference (stop minus start) equals `slot_difference`.
  double coincidence_probability(int slot_difference) const;

 private:
  std::vector<PairOutcome> outcomes_;
  std::vector<double> cumulative_;
  double visible_ = 0.0;
};

/// No interferometers: photons reach their detector with probability
/// detect_1 (arm 1) or detect_2 (arm 2).
OutcomeModel coincidence_model(source::Routing routing, double detect_1, double detect_2);

/// Photons pass Alice's (detector 0) and Bob's (detector 1) analyzers of
/// `setup`. Joint arrivals follow the coherent path sums; a photon whose twin
/// is lost or leaves through the other port arrives with its single-photon
/// marginal. With beam-splitter routing half of the pairs put both photons
/// into the same analyzer.
OutcomeModel interference_model(const pathcalc::Setup& setup, source::Routing routing,
                                double detect_1, double detect_2);

struct PipelineSpec {
  source::SourceConfig source;
  /// Efficiencies are ignored here; they belong in the outcome model.
  std::array<detect::DetectorSpec, 2> detectors{};
  double slot = 1e-9;  ///< interferometer imbalance [s]
  double tac_range = 60e-9;
  double tac_bin = 0.1e-9;
  double stop_delay = 5e-9;
  bool keep_coincidences = false;
  bool record_arrivals = false;
  double duration = 0.0;     ///< CW run length [s]
  std::int64_t pulses = 0;   ///< pulsed run length
  std::uint64_t seed = 0;
};

struct PipelineResult {
  detect::Histogram histogram;
  std::array<std::uint64_t, 2> singles{};
  double duration = 0.0;  ///< [s]
  std::uint64_t visible_pairs = 0;
  std::vector<detect::Coincidence> coincidences;
  source::SplitPhotons arrivals;  ///< photons reaching the detectors, if recorded
};

PipelineResult run_pipeline(const PipelineSpec& spec, const OutcomeModel& model);

}  // namespace pairsim::simulate
