#include "pairsim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairsim/error.hpp"

namespace pairsim::detect {

namespace {

constexpr std::uint64_t stream_photon = 0xde7e0001;
constexpr std::uint64_t stream_dark = 0xde7e0002;
constexpr double never = -std::numeric_limits<double>::infinity();

template <class T>
void require_sorted(std::span<const T> events, const char* what) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time)
      throw Error(Errc::invalid_argument, std::string(what) + " are not sorted in time");
  }
}

}  // namespace

void DetectorSpec::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw Error(Errc::invalid_argument, "quantum efficiency must lie in [0, 1]");
  if (!(dark_rate >= 0.0 && std::isfinite(dark_rate)))
    throw Error(Errc::invalid_argument, "dark count rate must be non-negative");
  if (!(dead_time >= 0.0 && std::isfinite(dead_time)))
    throw Error(Errc::invalid_argument, "dead time must be non-negative");
  if (!(jitter >= 0.0 && std::isfinite(jitter)))
    throw Error(Errc::invalid_argument, "timing jitter must be non-negative");
}

Detector::Detector(const DetectorSpec& spec, std::uint64_t seed, double start_time)
    : spec_(spec),
      photon_rng_(derive_seed(seed, stream_photon)),
      dark_rng_(derive_seed(seed, stream_dark)),
      jitter_(0.0, spec.jitter > 0.0 ? spec.jitter : 1.0),
      cursor_(start_time),
      last_accepted_(never) {
  spec_.validate();
}

void Detector::process(std::span<const Arrival> arrivals, double until,
                       std::vector<DetectionEvent>& out) {
  require_sorted(arrivals, "arrivals");
  if (!arrivals.empty() && (arrivals.front().time < cursor_ || arrivals.back().time >= until))
    throw Error(Errc::invalid_argument, "arrival outside the processed interval");

  const std::size_t before = pending_.size();
  for (const auto& a : arrivals) {
    if (spec_.efficiency < 1.0 && !(uniform01(photon_rng_) < spec_.efficiency)) continue;
    double t = a.time;
    if (spec_.jitter > 0.0) t += jitter_(photon_rng_);
    pending_.push_back({t, a.pair_id, a.slots});
  }
  if (spec_.dark_rate > 0.0) {
    double t = cursor_ - std::log1p(-uniform01(dark_rng_)) / spec_.dark_rate;
    while (t < until) {
      pending_.push_back({t, -1, 0});
      t -= std::log1p(-uniform01(dark_rng_)) / spec_.dark_rate;
    }
    // The overshooting draw is discarded; by memorylessness the next
    // interval starts afresh at `until`.
  }
  if (pending_.size() != before) {
    std::sort(pending_.begin() + static_cast<std::ptrdiff_t>(before), pending_.end(),
              [](auto& x, auto& y) { return x.time < y.time; });
    std::inplace_merge(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(before),
                       pending_.end(), [](auto& x, auto& y) { return x.time < y.time; });
  }
  cursor_ = until;
  release(until - 8.0 * spec_.jitter, out);
}

void Detector::finish(std::vector<DetectionEvent>& out) {
  release(std::numeric_limits<double>::infinity(), out);
}

void Detector::release(double limit, std::vector<DetectionEvent>& out) {
  std::size_t n = 0;
  for (; n < pending_.size() && pending_[n].time < limit; ++n) {
    const auto& e = pending_[n];
    if (e.time - last_accepted_ >= spec_.dead_time) {
      out.push_back(e);
      last_accepted_ = e.time;
    }
  }
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
}

std::vector<DetectionEvent> detect(std::span<const Arrival> arrivals, const DetectorSpec& spec,
                                   double duration, std::uint64_t seed) {
  require_sorted(arrivals, "arrivals");
  if (!(duration >= 0.0)) throw Error(Errc::invalid_argument, "duration must be non-negative");
  std::vector<DetectionEvent> out;
  Detector d(spec, seed, std::min(0.0, arrivals.empty() ? 0.0 : arrivals.front().time));
  double until = duration;
  if (!arrivals.empty() && arrivals.back().time >= until)
    until = std::nextafter(arrivals.back().time, std::numeric_limits<double>::infinity());
  d.process(arrivals, until, out);
  d.finish(out);
  return out;
}

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

void Histogram::merge(const Histogram& other) {
  if (other.counts.size() != counts.size() || other.bin_width != bin_width ||
      other.origin != origin)
    throw Error(Errc::invalid_argument, "histograms with different binning cannot be merged");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  starts += other.starts;
}

Histogram make_histogram(double range, double bin_width, double origin) {
  if (!(bin_width > 0.0) || !(range > 0.0))
    throw Error(Errc::config, "TAC range and bin width must be positive");
  if (bin_width >= range) throw Error(Errc::config, "TAC bin width must be smaller than its range");
  const double ratio = range / bin_width;
  const double rounded = std::round(ratio);
  const auto bins = static_cast<std::size_t>(std::abs(ratio - rounded) < 1e-9 * ratio
                                                 ? rounded
                                                 : std::ceil(ratio));
  Histogram h;
  h.origin = origin;
  h.bin_width = bin_width;
  h.counts.assign(bins, 0);
  return h;
}

TacAccumulator::TacAccumulator(double range, double bin_width, double stop_delay,
                               bool keep_coincidences)
    : range_(range),
      delay_(stop_delay),
      keep_(keep_coincidences),
      histogram_(make_histogram(range, bin_width)) {
  if (!std::isfinite(stop_delay)) throw Error(Errc::config, "stop delay must be finite");
}

void TacAccumulator::add_starts(std::span<const DetectionEvent> events) {
  require_sorted(events, "TAC starts");
  if (!events.empty() && events.front().time < last_start_)
    throw Error(Errc::invalid_argument, "TAC starts are not sorted in time");
  for (const auto& e : events) starts_.push_back(e);
  if (!events.empty()) last_start_ = events.back().time;
}

void TacAccumulator::add_stops(std::span<const DetectionEvent> events) {
  require_sorted(events, "TAC stops");
  if (!events.empty() && events.front().time + delay_ < last_stop_)
    throw Error(Errc::invalid_argument, "TAC stops are not sorted in time");
  for (auto e : events) {
    e.time += delay_;
    stops_.push_back(e);
  }
  if (!events.empty()) last_stop_ = stops_.back().time;
}

void TacAccumulator::process_start(const DetectionEvent& start) {
  // Non-retriggering: a start during a running conversion is ignored.
  if (start.time < busy_until_) return;
  ++histogram_.starts;
  busy_until_ = start.time + range_;
  while (!stops_.empty() && stops_.front().time < start.time) stops_.pop_front();
  if (stops_.empty()) return;
  const auto& stop = stops_.front();
  const double dt = stop.time - start.time;
  if (dt >= range_) return;
  busy_until_ = stop.time;
  const auto bin = static_cast<std::size_t>(dt / histogram_.bin_width);
  if (bin < histogram_.counts.size()) {
    ++histogram_.counts[bin];
    if (keep_)
      coincidences_.push_back({start.time, stop.time - delay_, dt, start.pair_id, stop.pair_id,
                               start.slots, stop.slots});
  }
  stops_.pop_front();
}

void TacAccumulator::advance(double watermark) {
  while (!starts_.empty() && starts_.front().time + range_ <= watermark + std::min(delay_, 0.0)) {
    process_start(starts_.front());
    starts_.pop_front();
  }
}

void TacAccumulator::finish() {
  while (!starts_.empty()) {
    process_start(starts_.front());
    starts_.pop_front();
  }
  stops_.clear();
}

Histogram tac(std::span<const DetectionEvent> starts, std::span<const DetectionEvent> stops,
              double range, double bin_width, double stop_delay) {
  TacAccumulator acc(range, bin_width, stop_delay);
  acc.add_starts(starts);
  acc.add_stops(stops);
  acc.finish();
  return acc.histogram();
}

void CoincidenceWindow::validate() const {
  if (!(width > 0.0 && std::isfinite(width)))
    throw Error(Errc::invalid_argument, "coincidence window width must be positive");
  if (!std::isfinite(center)) throw Error(Errc::invalid_argument, "window centre must be finite");
}

std::uint64_t window_counts(const Histogram& histogram, const CoincidenceWindow& window) {
  window.validate();
  const double lo = histogram.origin;
  const double hi = histogram.origin + histogram.range();
  if (window.low() < lo - 1e-6 * histogram.bin_width || window.high() > hi + 1e-6 * histogram.bin_width)
    throw Error(Errc::invalid_argument, "coincidence window lies outside the histogram range");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < histogram.counts.size(); ++i)
    if (window.contains(histogram.bin_center(i))) sum += histogram.counts[i];
  return sum;
}

double sca(const Histogram& histogram, const CoincidenceWindow& window, double duration) {
  if (!(duration > 0.0)) throw Error(Errc::invalid_argument, "duration must be positive");
  return static_cast<double>(window_counts(histogram, window)) / duration;
}

double sca(std::span<const Coincidence> pairs, const CoincidenceWindow& window, double duration) {
  window.validate();
  if (!(duration > 0.0)) throw Error(Errc::invalid_argument, "duration must be positive");
  std::uint64_t n = 0;
  for (const auto& p : pairs)
    if (window.contains(p.difference)) ++n;
  return static_cast<double>(n) / duration;
}

std::uint64_t threefold_counts(std::span<const Coincidence> pairs,
                               const CoincidenceWindow& pair_window, double pump_period,
                               const CoincidenceWindow& reference_a,
                               const CoincidenceWindow& reference_b) {
  pair_window.validate();
  reference_a.validate();
  reference_b.validate();
  if (!(pump_period > 0.0)) throw Error(Errc::invalid_argument, "pump period must be positive");
  std::uint64_t n = 0;
  for (const auto& p : pairs) {
    if (!pair_window.contains(p.difference)) continue;
    const double tick = std::floor(p.start / pump_period) * pump_period;
    if (reference_a.contains(p.start - tick) && reference_b.contains(p.stop - tick)) ++n;
  }
  return n;
}

}  // namespace pairsim::detect
