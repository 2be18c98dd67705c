#pragma once

// Pair emission statistics for CW and pulsed pumps, the fibre beam splitter
// that separates the twins, and the pair-rate / efficiency relations.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pairsim/random.hpp"

namespace pairsim::source {

enum class PumpMode { cw, pulsed };
enum class PairStatistics { poisson, thermal };

/// How the two photons of a pair reach the two detection arms.
enum class Routing {
  beamsplitter,   ///< each photon independently to arm 1 or 2 with probability 1/2
  deterministic,  ///< signal always to arm 1, idler always to arm 2
};

struct SourceConfig {
  double efficiency = 0.0;          ///< pairs per pump photon
  double pump_power = 0.0;          ///< mean power [W]
  double pump_wavelength = 657e-9;  ///< [m]
  PumpMode mode = PumpMode::cw;
  double repetition_rate = 80e6;    ///< [Hz], pulsed only
  double pulse_duration = 400e-12;  ///< [s], pulsed only
  PairStatistics statistics = PairStatistics::poisson;

  void validate() const;
  double pair_rate() const;             ///< pairs per second
  double mean_pairs_per_pulse() const;  ///< mu, pulsed only
  double period() const { return 1.0 / repetition_rate; }
};

/// Pump photons per second, P * lambda / (h c).
double pump_photon_rate(double power, double wavelength);

double photons_per_pulse(double mean_power, double repetition_rate, double wavelength);

/// Conversion efficiency from net singles and coincidence rates:
/// eta = S1 S2 / (2 R_C) * h c / (P lambda). The factor 2 accounts for the
/// half of the pairs that leave the splitter through the same port.
double estimate_efficiency(double singles_1, double singles_2, double coincidences, double power,
                           double wavelength);

struct PairEvent {
  double time = 0.0;           ///< emission time [s]
  std::int64_t pulse_index = -1;  ///< -1 for a CW pump
  std::uint64_t pair_id = 0;
};

/// Block-wise pair generator. Each block draws from its own sub-seed, so a run
/// is reproducible and disjoint blocks can be produced independently.
///
/// With keep_probability q < 1 only a random subset of pairs is emitted, each
/// pair kept independently with probability q. Callers use this to skip pairs
/// that are certain to go undetected; the kept stream has the same law as
/// thinning the full stream.
class EmissionStream {
 public:
  static EmissionStream cw(const SourceConfig& config, double duration, std::uint64_t seed,
                           double keep_probability = 1.0);
  static EmissionStream pulsed(const SourceConfig& config, std::int64_t pulses,
                               std::uint64_t seed, double keep_probability = 1.0);

  /// Replaces `block` with the next block of events. False once exhausted.
  bool next(std::vector<PairEvent>& block);

  /// Every event not yet returned has emission time >= watermark().
  double watermark() const noexcept { return watermark_; }
  double end_time() const noexcept;

  static constexpr double cw_block_duration = 1e-3;
  static constexpr std::int64_t pulses_per_block = 1 << 20;

 private:
  EmissionStream(const SourceConfig& config, std::uint64_t seed, double keep_probability);

  void fill_cw_block(std::vector<PairEvent>& block);
  void fill_pulsed_block(std::vector<PairEvent>& block);

  SourceConfig config_;
  std::uint64_t seed_;
  double keep_;
  double duration_ = 0.0;
  std::int64_t pulses_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t next_id_ = 0;
  double watermark_ = 0.0;
};

/// CW: Poisson process over [0, duration). Pulsed: all pulses starting in
/// [0, duration).
std::vector<PairEvent> generate_emissions(const SourceConfig& config, double duration,
                                          std::uint64_t seed);
std::vector<PairEvent> generate_pulsed_emissions(const SourceConfig& config, std::int64_t pulses,
                                                 std::uint64_t seed);

struct Photon {
  double time = 0.0;
  std::int64_t pulse_index = -1;
  std::uint64_t pair_id = 0;
  int member = 0;  ///< 0 signal, 1 idler
};

struct SplitPhotons {
  std::vector<Photon> arm1;
  std::vector<Photon> arm2;
};

/// Independent fair coin per photon; arms keep the input time order.
SplitPhotons split_pairs(std::span<const PairEvent> events, std::uint64_t seed);

/// Header `time_ns,pulse_index,pair_id,arm`, rows merged in time order.
void write_events_csv(std::ostream& out, const SplitPhotons& photons);

/// Zero-truncated Poisson draw (mean parameter `lambda` of the untruncated law).
std::int64_t sample_truncated_poisson(Rng& rng, double lambda);
/// Number of failures before the first success, success probability p in (0, 1].
std::int64_t sample_geometric(Rng& rng, double p);

}  // namespace pairsim::source
