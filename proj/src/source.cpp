#include "pairsim/source.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pairsim/error.hpp"
#include "pairsim/units.hpp"

namespace pairsim::source {

namespace {

constexpr std::uint64_t stream_emission = 0x5eed0001;
constexpr std::uint64_t stream_split = 0x5eed0002;

double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

std::int64_t sample_poisson(Rng& rng, double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda > 30.0) return std::poisson_distribution<std::int64_t>(lambda)(rng);
  const double u = uniform01(rng);
  double p = std::exp(-lambda);
  double acc = p;
  std::int64_t k = 0;
  while (acc <= u && k < 1000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    acc += p;
  }
  return k;
}

}  // namespace

void SourceConfig::validate() const {
  if (!(std::isfinite(efficiency) && efficiency >= 0.0 && efficiency < 1e-2))
    throw Error(Errc::invalid_argument, "conversion efficiency must lie in [0, 1e-2)");
  if (!(std::isfinite(pump_power) && pump_power >= 0.0))
    throw Error(Errc::invalid_argument, "pump power must be non-negative");
  if (!(pump_wavelength > 0.0)) throw Error(Errc::invalid_argument, "pump wavelength must be positive");
  if (mode == PumpMode::pulsed) {
    if (!(repetition_rate > 0.0)) throw Error(Errc::invalid_argument, "repetition rate must be positive");
    if (!(pulse_duration > 0.0 && pulse_duration < 1.0 / repetition_rate))
      throw Error(Errc::invalid_argument, "pulse duration must lie in (0, 1/repetition_rate)");
  }
}

double SourceConfig::pair_rate() const {
  return efficiency * pump_photon_rate(pump_power, pump_wavelength);
}

double SourceConfig::mean_pairs_per_pulse() const {
  return efficiency * photons_per_pulse(pump_power, repetition_rate, pump_wavelength);
}

double pump_photon_rate(double power, double wavelength) {
  if (!(power >= 0.0)) throw Error(Errc::invalid_argument, "pump power must be non-negative");
  return power * wavelength / (planck * speed_of_light);
}

double photons_per_pulse(double mean_power, double repetition_rate, double wavelength) {
  if (!(repetition_rate > 0.0)) throw Error(Errc::invalid_argument, "repetition rate must be positive");
  return pump_photon_rate(mean_power, wavelength) / repetition_rate;
}

double estimate_efficiency(double singles_1, double singles_2, double coincidences, double power,
                           double wavelength) {
  if (singles_1 < 0.0 || singles_2 < 0.0 || coincidences < 0.0)
    throw Error(Errc::invalid_argument, "count rates must be non-negative");
  if (!(coincidences > 0.0))
    throw Error(Errc::undefined_estimate, "coincidence rate is zero; efficiency undefined");
  if (!(power > 0.0 && wavelength > 0.0))
    throw Error(Errc::undefined_estimate, "pump power and wavelength must be positive");
  return singles_1 * singles_2 / (2.0 * coincidences) * planck * speed_of_light /
         (power * wavelength);
}

std::int64_t sample_truncated_poisson(Rng& rng, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_argument, "truncated Poisson needs lambda > 0");
  if (lambda > 10.0) {
    for (;;) {
      const auto k = sample_poisson(rng, lambda);
      if (k > 0) return k;
    }
  }
  const double p0 = std::exp(-lambda);
  const double target = p0 + uniform01(rng) * (1.0 - p0);
  double p = p0 * lambda;
  double acc = p0 + p;
  std::int64_t k = 1;
  while (acc <= target && k < 1000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    acc += p;
  }
  return k;
}

std::int64_t sample_geometric(Rng& rng, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "geometric needs p in (0, 1]");
  if (p >= 1.0) return 0;
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  const double k = std::floor(std::log(u) / std::log1p(-p));
  return k > 4e18 ? std::int64_t{4'000'000'000'000'000'000} : static_cast<std::int64_t>(k);
}

EmissionStream::EmissionStream(const SourceConfig& config, std::uint64_t seed,
                               double keep_probability)
    : config_(config), seed_(seed), keep_(keep_probability) {
  config_.validate();
  if (!(keep_probability >= 0.0 && keep_probability <= 1.0))
    throw Error(Errc::invalid_argument, "keep probability must lie in [0, 1]");
}

EmissionStream EmissionStream::cw(const SourceConfig& config, double duration, std::uint64_t seed,
                                  double keep_probability) {
  if (config.mode != PumpMode::cw) throw Error(Errc::invalid_argument, "source is not CW");
  if (!(duration >= 0.0 && std::isfinite(duration)))
    throw Error(Errc::invalid_argument, "duration must be non-negative");
  EmissionStream s(config, seed, keep_probability);
  s.duration_ = duration;
  return s;
}

EmissionStream EmissionStream::pulsed(const SourceConfig& config, std::int64_t pulses,
                                      std::uint64_t seed, double keep_probability) {
  if (config.mode != PumpMode::pulsed) throw Error(Errc::invalid_argument, "source is not pulsed");
  if (pulses < 0) throw Error(Errc::invalid_argument, "pulse count must be non-negative");
  EmissionStream s(config, seed, keep_probability);
  s.pulses_ = pulses;
  return s;
}

double EmissionStream::end_time() const noexcept {
  return config_.mode == PumpMode::cw ? duration_
                                      : static_cast<double>(pulses_) * config_.period();
}

bool EmissionStream::next(std::vector<PairEvent>& block) {
  block.clear();
  if (config_.mode == PumpMode::cw) {
    const double begin = static_cast<double>(block_) * cw_block_duration;
    if (begin >= duration_) return false;
    fill_cw_block(block);
  } else {
    const std::int64_t first = static_cast<std::int64_t>(block_) * pulses_per_block;
    if (first >= pulses_) return false;
    fill_pulsed_block(block);
  }
  for (auto& e : block) e.pair_id = next_id_++;
  ++block_;
  return true;
}

void EmissionStream::fill_cw_block(std::vector<PairEvent>& block) {
  const double begin = static_cast<double>(block_) * cw_block_duration;
  const double end = std::min(duration_, begin + cw_block_duration);
  watermark_ = end;
  const double rate = config_.pair_rate() * keep_;
  if (!(rate > 0.0)) return;
  Rng rng(derive_seed(seed_, stream_emission, block_));
  double t = begin + exponential(rng, rate);
  while (t < end) {
    block.push_back({t, -1, 0});
    t += exponential(rng, rate);
  }
}

void EmissionStream::fill_pulsed_block(std::vector<PairEvent>& block) {
  const std::int64_t first = static_cast<std::int64_t>(block_) * pulses_per_block;
  const std::int64_t last = std::min(pulses_, first + pulses_per_block);
  const double period = config_.period();
  watermark_ = static_cast<double>(last) * period;

  const double mean = config_.mean_pairs_per_pulse() * keep_;
  if (!(mean > 0.0)) return;
  // Probability that a pulse carries at least one kept pair.
  const double hit = config_.statistics == PairStatistics::poisson ? -std::expm1(-mean)
                                                                   : mean / (1.0 + mean);
  Rng rng(derive_seed(seed_, stream_emission, block_));
  std::vector<double> times;
  std::int64_t pulse = first + sample_geometric(rng, hit);
  while (pulse < last) {
    std::int64_t n;
    if (config_.statistics == PairStatistics::poisson) {
      n = sample_truncated_poisson(rng, mean);
    } else {
      // Bose-Einstein count conditioned on n >= 1 is 1 + geometric.
      n = 1 + sample_geometric(rng, 1.0 / (1.0 + mean));
    }
    times.clear();
    const double t0 = static_cast<double>(pulse) * period;
    for (std::int64_t k = 0; k < n; ++k)
      times.push_back(t0 + uniform01(rng) * config_.pulse_duration);
    std::sort(times.begin(), times.end());
    for (double t : times) block.push_back({t, pulse, 0});
    const auto gap = sample_geometric(rng, hit);
    if (gap >= last - pulse) break;
    pulse += 1 + gap;
  }
}

std::vector<PairEvent> generate_emissions(const SourceConfig& config, double duration,
                                          std::uint64_t seed) {
  if (config.mode == PumpMode::pulsed) {
    const auto pulses = static_cast<std::int64_t>(std::ceil(duration * config.repetition_rate));
    return generate_pulsed_emissions(config, pulses, seed);
  }
  std::vector<PairEvent> out, block;
  auto stream = EmissionStream::cw(config, duration, seed);
  while (stream.next(block)) out.insert(out.end(), block.begin(), block.end());
  return out;
}

std::vector<PairEvent> generate_pulsed_emissions(const SourceConfig& config, std::int64_t pulses,
                                                 std::uint64_t seed) {
  std::vector<PairEvent> out, block;
  auto stream = EmissionStream::pulsed(config, pulses, seed);
  while (stream.next(block)) out.insert(out.end(), block.begin(), block.end());
  return out;
}

SplitPhotons split_pairs(std::span<const PairEvent> events, std::uint64_t seed) {
  SplitPhotons out;
  Rng rng(derive_seed(seed, stream_split));
  for (const auto& e : events) {
    for (int member = 0; member < 2; ++member) {
      Photon ph{e.time, e.pulse_index, e.pair_id, member};
      if (rng() >> 63) out.arm2.push_back(ph);
      else out.arm1.push_back(ph);
    }
  }
  return out;
}

void write_events_csv(std::ostream& out, const SplitPhotons& photons) {
  out << "time_ns,pulse_index,pair_id,arm\n";
  char buf[128];
  auto row = [&](const Photon& p, int arm) {
    std::snprintf(buf, sizeof buf, "%.6f,%lld,%llu,%d\n", p.time / units::ns,
                  static_cast<long long>(p.pulse_index),
                  static_cast<unsigned long long>(p.pair_id), arm);
    out << buf;
  };
  std::size_t i = 0, j = 0;
  const auto& a = photons.arm1;
  const auto& b = photons.arm2;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].time <= b[j].time)) row(a[i++], 1);
    else row(b[j++], 2);
  }
}

}  // namespace pairsim::source
