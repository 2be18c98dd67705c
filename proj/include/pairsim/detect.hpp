#pragma once

// Geiger-mode detectors, a single-stop time-to-amplitude converter and the
// single-channel analyzer window.

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "pairsim/random.hpp"

namespace pairsim::detect {

struct DetectorSpec {
  double efficiency = 1.0;  ///< quantum efficiency in [0, 1]
  double dark_rate = 0.0;   ///< [Hz]
  double dead_time = 0.0;   ///< non-paralyzable [s]
  double jitter = 0.0;      ///< Gaussian sigma [s]

  void validate() const;
};

struct Arrival {
  double time = 0.0;
  std::int64_t pair_id = -1;
  int slots = 0;  ///< interferometer delay slots travelled (bookkeeping only)
};

struct DetectionEvent {
  double time = 0.0;
  std::int64_t pair_id = -1;  ///< -1 for a dark count
  int slots = 0;

  bool dark() const noexcept { return pair_id < 0; }
};

/// Streaming detector. Arrivals are fed in time order in consecutive chunks;
/// events are released once no later input can precede them.
class Detector {
 public:
  Detector(const DetectorSpec& spec, std::uint64_t seed, double start_time = 0.0);

  /// Consumes arrivals with time in [cursor, until) and adds dark counts over
  /// the same interval. Throws Error(invalid_argument) on unsorted input.
  void process(std::span<const Arrival> arrivals, double until,
               std::vector<DetectionEvent>& out);
  /// Releases everything still pending.
  void finish(std::vector<DetectionEvent>& out);

  double cursor() const noexcept { return cursor_; }

 private:
  void release(double limit, std::vector<DetectionEvent>& out);

  DetectorSpec spec_;
  Rng photon_rng_;
  Rng dark_rng_;
  std::normal_distribution<double> jitter_;
  double cursor_;
  double last_accepted_;
  std::vector<DetectionEvent> pending_;
};

/// One-shot detection of a sorted arrival list over [0, duration).
std::vector<DetectionEvent> detect(std::span<const Arrival> arrivals, const DetectorSpec& spec,
                                   double duration, std::uint64_t seed);

struct Histogram {
  double origin = 0.0;              ///< [s]
  double bin_width = 0.1e-9;        ///< [s]
  std::vector<std::uint64_t> counts;
  std::uint64_t starts = 0;         ///< starts that opened a conversion

  double range() const noexcept { return bin_width * static_cast<double>(counts.size()); }
  double bin_start(std::size_t i) const noexcept { return origin + bin_width * static_cast<double>(i); }
  double bin_center(std::size_t i) const noexcept { return bin_start(i) + 0.5 * bin_width; }
  std::uint64_t total() const noexcept;

  /// Adds another histogram with identical binning.
  void merge(const Histogram& other);
};

Histogram make_histogram(double range, double bin_width, double origin = 0.0);

struct Coincidence {
  double start = 0.0;
  double stop = 0.0;        ///< undelayed stop time
  double difference = 0.0;  ///< stop + delay - start
  std::int64_t start_pair = -1;
  std::int64_t stop_pair = -1;
  int start_slots = 0;
  int stop_slots = 0;
};

/// Single-stop, non-retriggering start-stop converter. A start opens a
/// conversion that ends at the first stop with 0 <= t_stop + delay - t_start <
/// range, or after the full range. Starts arriving while a conversion runs are
/// ignored, so every stop pairs with at most one start.
class TacAccumulator {
 public:
  TacAccumulator(double range, double bin_width, double stop_delay = 0.0,
                 bool keep_coincidences = false);

  void add_starts(std::span<const DetectionEvent> events);
  void add_stops(std::span<const DetectionEvent> events);
  /// Declares that every start and stop earlier than `watermark` was added.
  void advance(double watermark);
  void finish();

  const Histogram& histogram() const noexcept { return histogram_; }
  const std::vector<Coincidence>& coincidences() const noexcept { return coincidences_; }
  void clear_coincidences() { coincidences_.clear(); }
  double stop_delay() const noexcept { return delay_; }

 private:
  void process_start(const DetectionEvent& start);

  double range_;
  double delay_;
  bool keep_;
  Histogram histogram_;
  std::vector<Coincidence> coincidences_;
  std::deque<DetectionEvent> starts_;
  std::deque<DetectionEvent> stops_;  ///< times already delayed
  double last_start_ = -1e300;
  double last_stop_ = -1e300;
  double busy_until_ = -1e300;
};

Histogram tac(std::span<const DetectionEvent> starts, std::span<const DetectionEvent> stops,
              double range, double bin_width, double stop_delay = 0.0);

struct CoincidenceWindow {
  double center = 0.0;
  double width = 1e-9;

  void validate() const;
  double low() const noexcept { return center - 0.5 * width; }
  double high() const noexcept { return center + 0.5 * width; }
  bool contains(double t) const noexcept { return t >= low() && t < high(); }
};

/// Counts of the bins whose centre falls inside the window.
std::uint64_t window_counts(const Histogram& histogram, const CoincidenceWindow& window);

/// Windowed coincidence rate [Hz]. The window must lie inside the histogram.
double sca(const Histogram& histogram, const CoincidenceWindow& window, double duration);
/// Same from exact start-stop differences.
double sca(std::span<const Coincidence> pairs, const CoincidenceWindow& window, double duration);

/// Three-fold selection: coincidences inside `pair_window` whose start and
/// stop times, measured from the preceding pump clock tick, fall inside
/// `reference_a` and `reference_b`.
std::uint64_t threefold_counts(std::span<const Coincidence> pairs,
                               const CoincidenceWindow& pair_window, double pump_period,
                               const CoincidenceWindow& reference_a,
                               const CoincidenceWindow& reference_b);

}  // namespace pairsim::detect
