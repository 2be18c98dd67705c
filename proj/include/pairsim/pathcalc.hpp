#pragma once

// Path-amplitude model of photon pairs travelling through unbalanced
// Mach-Zehnder analyzers. Amplitudes of routes with identical
// emission-referenced arrival times are added coherently; everything else is
// added in probability.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pairsim::pathcalc {

struct InterferometerSpec {
  double imbalance = 1e-9;          ///< long-minus-short arm delay [s]
  double phase = 0.0;               ///< long-arm phase [rad]
  double transmission_short = 1.0;  ///< arm amplitude transmission, 1 = lossless
  double transmission_long = 1.0;
  double loss = 1.0;                ///< lumped per-pass transmission probability

  /// Throws Error(invalid_argument) on a non-physical device.
  void validate() const;
};

/// Delay of a fibre arm-length difference with the given group index.
double imbalance_from_fiber(double length_difference, double group_index);

struct PhotonPath {
  double delay = 0.0;  ///< [s]
  int slots = 0;       ///< delay in units of the common imbalance
  double phase = 0.0;  ///< [rad]
  std::complex<double> amplitude{0.0, 0.0};
  std::string label;
};

/// The two routes (short, long) from the input to `output_port` (0 or 1).
/// Port 1 carries an extra pi on the long arm.
std::vector<PhotonPath> propagate(const InterferometerSpec& spec, int output_port = 0,
                                  std::string_view tag = {});

enum class PumpCoherence {
  continuous,  ///< coherence longer than any imbalance; no emission-time reference
  pulsed,      ///< each pulse is an emission-time reference
};

struct Pump {
  PumpCoherence coherence = PumpCoherence::continuous;
  std::vector<PhotonPath> paths;
};

Pump cw_pump();
Pump pulsed_pump();
/// Pulsed pump behind an interferometer: amplitudes t_arm * sqrt(loss) / sqrt(2).
Pump pulsed_pump(const InterferometerSpec& pump_interferometer);

enum class Observables {
  two_fold_difference,    ///< bin by t_A - t_B only
  three_fold_referenced,  ///< bin by (t_A - t_P, t_B - t_P)
};

using BinKey = std::vector<int>;

struct JointOutcome {
  BinKey key;                        ///< observable delays in units of the imbalance
  std::vector<double> time_signature;  ///< same delays [s]
  double probability = 0.0;
  std::vector<std::string> contributing_labels;
};

/// A set of routes sharing one physical time signature, already squared.
/// For a continuous pump only the difference slots_a - slots_b is physical;
/// the pair is then reported as (max(d, 0), max(-d, 0)).
struct CoherentGroup {
  int slots_a = 0;
  int slots_b = 0;
  double probability = 0.0;
  std::vector<std::string> labels;
};

std::vector<CoherentGroup> coherent_groups(const Pump& pump, std::span<const PhotonPath> paths_a,
                                           std::span<const PhotonPath> paths_b,
                                           double v_dephase = 1.0);

std::vector<JointOutcome> joint_outcomes(const Pump& pump, std::span<const PhotonPath> paths_a,
                                         std::span<const PhotonPath> paths_b,
                                         Observables observables, double v_dephase = 1.0);

/// List form: a single pump path is read as a continuous pump, several paths
/// as a pulsed pump behind an interferometer.
std::vector<JointOutcome> joint_outcomes(std::span<const PhotonPath> pump_paths,
                                         std::span<const PhotonPath> paths_a,
                                         std::span<const PhotonPath> paths_b,
                                         Observables observables, double v_dephase = 1.0);

struct Setup {
  PumpCoherence pump = PumpCoherence::continuous;
  std::optional<InterferometerSpec> pump_interferometer;  ///< pulsed only
  InterferometerSpec alice;
  InterferometerSpec bob;
  int port_a = 0;
  int port_b = 0;
  Observables observables = Observables::two_fold_difference;
  double v_dephase = 1.0;  ///< multiplies every interference cross-term

  Pump make_pump() const;
  void validate() const;
};

std::vector<JointOutcome> joint_outcomes(const Setup& setup);

struct ScanValue {
  double phase = 0.0;
  double probability = 0.0;
};

/// Probability of bin `key` while Alice's phase steps through `phases`.
/// Throws Error(lookup) when no outcome carries `key`.
std::vector<ScanValue> visibility_scan(const Setup& setup, std::span<const double> phases,
                                       const BinKey& key);

/// (max - min) / (max + min) over the scan; 0 for an all-zero scan.
double fringe_visibility(std::span<const ScanValue> scan);

}  // namespace pairsim::pathcalc
