#include "pairsim/analyze.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "pairsim/error.hpp"

namespace pairsim::analyze {

std::size_t PeakSet::central_index() const {
  if (peaks.empty()) throw Error(Errc::invalid_argument, "peak set is empty");
  return static_cast<std::size_t>(
      std::max_element(peaks.begin(), peaks.end(),
                       [](auto& a, auto& b) { return a.area < b.area; }) -
      peaks.begin());
}

double PeakSet::mean_spacing() const noexcept {
  if (peaks.size() < 2) return 0.0;
  return (peaks.back().position - peaks.front().position) / static_cast<double>(peaks.size() - 1);
}

PeakSet find_peaks(const detect::Histogram& histogram, double expected_spacing) {
  std::vector<double> values(histogram.counts.begin(), histogram.counts.end());
  return find_peaks(values, histogram.origin, histogram.bin_width, expected_spacing);
}

PeakSet find_peaks(std::span<const double> values, double origin, double bin_width,
                   double expected_spacing) {
  if (!(bin_width > 0.0)) throw Error(Errc::invalid_argument, "bin width must be positive");
  if (!(expected_spacing > 2.0 * bin_width))
    throw Error(Errc::invalid_argument, "peak spacing must exceed two bins");

  PeakSet out;
  out.expected_spacing = expected_spacing;
  const std::size_t n = values.size();
  if (n == 0) return out;

  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  double median = sorted[n / 2];
  if (n % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2));
    median = 0.5 * (median + lower);
  }
  const double floor = median + 5.0 * std::sqrt(std::max(median, 0.0));

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (!(v > floor)) continue;
    if (i > 0 && values[i - 1] > v) continue;
    if (i + 1 < n && values[i + 1] > v) continue;
    candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  const auto suppress = static_cast<std::ptrdiff_t>(std::floor(0.5 * expected_spacing / bin_width));
  const auto half_width = static_cast<std::ptrdiff_t>(std::floor(0.25 * expected_spacing / bin_width));
  std::vector<std::size_t> accepted;
  for (auto c : candidates) {
    const bool near = std::any_of(accepted.begin(), accepted.end(), [&](std::size_t a) {
      return std::abs(static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(c)) < suppress;
    });
    if (!near) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end());

  for (auto c : accepted) {
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(c) - half_width);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1,
                                             static_cast<std::ptrdiff_t>(c) + half_width);
    double area = 0.0, moment = 0.0;
    for (auto i = lo; i <= hi; ++i) {
      const double v = values[static_cast<std::size_t>(i)];
      area += v;
      moment += v * (origin + (static_cast<double>(i) + 0.5) * bin_width);
    }
    const double position =
        area > 0.0 ? moment / area : origin + (static_cast<double>(c) + 0.5) * bin_width;
    out.peaks.push_back({position, area});
  }
  return out;
}

std::vector<double> correct_pileup(const detect::Histogram& histogram) {
  std::vector<double> out(histogram.counts.begin(), histogram.counts.end());
  if (histogram.starts == 0) return out;
  const double starts = static_cast<double>(histogram.starts);
  double consumed = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double raw = static_cast<double>(histogram.counts[i]);
    const double live = starts - consumed;
    out[i] = live > 0.0 ? starts * raw / live : 0.0;
    consumed += raw;
  }
  return out;
}

MuEstimate infer_mu(const PeakSet& peaks, PairSplitting splitting) {
  if (peaks.peaks.size() < 2)
    throw Error(Errc::invalid_argument, "need the central peak and at least one satellite");
  const std::size_t centre = peaks.central_index();
  const double central = peaks.peaks[centre].area;
  double satellites = 0.0;
  for (std::size_t i = 0; i < peaks.peaks.size(); ++i)
    if (i != centre) satellites += peaks.peaks[i].area;
  satellites /= static_cast<double>(peaks.peaks.size() - 1);
  if (!(central > 0.0)) throw Error(Errc::inversion_domain, "central peak is empty");

  const double r = satellites / central;
  if (r >= 1.0)
    throw Error(Errc::inversion_domain,
                "satellite/central ratio >= 1; data are saturated or not Poissonian");
  const double mu = splitting == PairSplitting::deterministic ? r / (1.0 - r)
                                                              : 0.5 * r / (1.0 - r);
  return {mu, r};
}

VisibilityFit fit_visibility(std::span<const ScanPoint> scan) {
  if (scan.size() < 4) throw Error(Errc::invalid_argument, "visibility fit needs at least 4 points");

  // Normal equations for counts = a + b cos(phi) + c sin(phi).
  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> rhs{};
  for (const auto& p : scan) {
    if (!std::isfinite(p.phase) || !std::isfinite(p.counts))
      throw Error(Errc::invalid_argument, "scan contains a non-finite value");
    const double w = 1.0 / std::max(p.counts, 1.0);
    const std::array<double, 3> x{1.0, std::cos(p.phase), std::sin(p.phase)};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += w * x[i] * p.counts;
      for (int j = 0; j < 3; ++j) m[i][j] += w * x[i] * x[j];
    }
  }

  // Inverse by cofactors; the matrix is symmetric positive semidefinite.
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const double scale = m[0][0] * m[1][1] * m[2][2];
  if (!(std::abs(det) > 1e-12 * std::abs(scale)) || !(std::abs(det) > 0.0))
    throw Error(Errc::fit_degenerate, "degenerate design matrix; phases do not span a fringe");

  std::array<std::array<double, 3>, 3> inv{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
    }
  }

  double lo = scan.front().phase, hi = scan.front().phase;
  for (const auto& p : scan) {
    lo = std::min(lo, p.phase);
    hi = std::max(hi, p.phase);
  }
  if (hi - lo < std::numbers::pi - 1e-9)
    throw Error(Errc::invalid_argument, "scan must span at least pi of phase");

  std::array<double, 3> beta{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) beta[i] += inv[i][j] * rhs[j];
  const double a = beta[0], b = beta[1], c = beta[2];
  if (!(a > 0.0)) throw Error(Errc::fit_degenerate, "fitted baseline is not positive");

  VisibilityFit fit;
  const double amp = std::hypot(b, c);
  fit.baseline = a;
  fit.visibility = amp / a;
  fit.phase_offset = std::atan2(-c, b);

  // Delta-method propagation of the parameter covariance.
  if (amp > 1e-300) {
    const std::array<double, 3> g{-amp / (a * a), b / (a * amp), c / (a * amp)};
    double var = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) var += g[i] * inv[i][j] * g[j];
    fit.sigma = std::sqrt(std::max(var, 0.0));
  } else {
    fit.sigma = std::sqrt(0.5 * (inv[1][1] + inv[2][2])) / a;
  }

  for (const auto& p : scan) {
    const double model = a + b * std::cos(p.phase) + c * std::sin(p.phase);
    const double r = p.counts - model;
    fit.chi2 += r * r / std::max(p.counts, 1.0);
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  return fit;
}

namespace {

double accidental_counts(double s1, double s2, double window, double duration) {
  if (s1 < 0.0 || s2 < 0.0 || window < 0.0 || duration < 0.0)
    throw Error(Errc::invalid_argument, "rates, window and duration must be non-negative");
  return s1 * s2 * window * duration;
}

}  // namespace

NetVisibility subtract_accidentals(std::span<const ScanPoint> raw, double singles_1,
                                   double singles_2, double window, double duration) {
  NetVisibility out;
  out.accidental_counts = accidental_counts(singles_1, singles_2, window, duration);
  std::vector<ScanPoint> net(raw.begin(), raw.end());
  for (auto& p : net) {
    p.counts -= out.accidental_counts;
    if (p.counts < 0.0) {
      p.counts = 0.0;
      out.clamped = true;
    }
  }
  out.fit = fit_visibility(net);
  return out;
}

NetVisibility subtract_accidentals(const VisibilityFit& raw, double singles_1, double singles_2,
                                   double window, double duration) {
  NetVisibility out;
  out.accidental_counts = accidental_counts(singles_1, singles_2, window, duration);
  out.fit = raw;
  double signal = raw.baseline - out.accidental_counts;
  if (signal <= 0.0) {
    out.clamped = true;
    signal = std::numeric_limits<double>::min();
  }
  const double gain = raw.baseline / signal;
  out.fit.visibility = raw.visibility * gain;
  out.fit.sigma = raw.sigma * gain;
  out.fit.baseline = signal;
  return out;
}

double net_visibility(double raw_visibility, double accidental_to_signal) {
  if (accidental_to_signal < 0.0)
    throw Error(Errc::invalid_argument, "accidental/signal ratio must be non-negative");
  return raw_visibility * (1.0 + accidental_to_signal);
}

BellSignificance bell_significance(double visibility, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::invalid_argument, "visibility uncertainty must be positive");
  return {(visibility - bell_visibility_bound) / sigma, 2.0 * std::numbers::sqrt2 * visibility};
}

}  // namespace pairsim::analyze
