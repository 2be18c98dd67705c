#pragma once

// Recovery of physical quantities from coincidence histograms and phase scans.

#include <cstdint>
#include <span>
#include <vector>

#include "pairsim/detect.hpp"

namespace pairsim::analyze {

struct Peak {
  double position = 0.0;  ///< centroid [s]
  double area = 0.0;      ///< counts within +-spacing/4 of the maximum
};

struct PeakSet {
  std::vector<Peak> peaks;  ///< strictly increasing positions
  double expected_spacing = 0.0;

  bool empty() const noexcept { return peaks.empty(); }
  /// Index of the largest-area peak.
  std::size_t central_index() const;
  /// Mean distance between neighbouring peaks; 0 with fewer than two.
  double mean_spacing() const noexcept;
};

/// Local maxima above median + 5 sqrt(median); maxima closer than half the
/// expected spacing to a higher one are suppressed.
PeakSet find_peaks(const detect::Histogram& histogram, double expected_spacing);
PeakSet find_peaks(std::span<const double> values, double origin, double bin_width,
                   double expected_spacing);

/// Undoes single-stop pile-up: bin i becomes starts * N_i / (starts - sum_{j<i} N_j).
/// Returns raw counts unchanged when the histogram records no starts.
std::vector<double> correct_pileup(const detect::Histogram& histogram);

enum class PairSplitting {
  deterministic,  ///< signal always starts, idler always stops
  beamsplitter,   ///< both photons independently on a 50/50 splitter
};

struct MuEstimate {
  double mu = 0.0;     ///< mean pairs per pulse
  double ratio = 0.0;  ///< mean satellite area / central area
};

/// Poisson pairs, small detection probabilities: r = mu / (1 + mu) for
/// deterministic splitting, r = mu / (1/2 + mu) behind a beam splitter.
MuEstimate infer_mu(const PeakSet& peaks,
                    PairSplitting splitting = PairSplitting::deterministic);

struct ScanPoint {
  double phase = 0.0;   ///< [rad]
  double counts = 0.0;
};

struct VisibilityFit {
  double visibility = 0.0;
  double sigma = 0.0;         ///< standard error of the visibility
  double phase_offset = 0.0;  ///< Phi_0 in R0 (1 + V cos(Phi + Phi_0))
  double baseline = 0.0;      ///< R0 [counts]
  double chi2 = 0.0;
  double max_residual = 0.0;
};

/// Weighted linear least squares of R0 (1 + V cos(Phi + Phi_0)) with Poisson
/// weights 1 / max(counts, 1).
VisibilityFit fit_visibility(std::span<const ScanPoint> scan);

struct NetVisibility {
  VisibilityFit fit;
  double accidental_counts = 0.0;  ///< subtracted from every point
  bool clamped = false;            ///< some point would have gone negative
};

/// Accidental rate S1 S2 tau times the per-point counting time, subtracted
/// from every point before refitting.
NetVisibility subtract_accidentals(std::span<const ScanPoint> raw, double singles_1,
                                   double singles_2, double window, double duration);
/// Same correction applied to a fit: V_net = V_raw R0 / (R0 - A).
NetVisibility subtract_accidentals(const VisibilityFit& raw, double singles_1, double singles_2,
                                   double window, double duration);

/// V_net = V_raw (R_sig + R_acc) / R_sig.
double net_visibility(double raw_visibility, double accidental_to_signal);

inline constexpr double bell_visibility_bound = 0.70710678118654752440;

struct BellSignificance {
  double sigmas = 0.0;  ///< (V - 1/sqrt 2) / sigma_V
  double chsh = 0.0;    ///< 2 sqrt(2) V
  bool violates() const noexcept { return chsh > 2.0; }
};

BellSignificance bell_significance(double visibility, double sigma);

}  // namespace pairsim::analyze
