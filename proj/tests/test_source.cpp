#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pairsim/error.hpp"
#include "pairsim/source.hpp"
#include "pairsim/units.hpp"

using namespace pairsim;
using namespace pairsim::source;

namespace {

// Independent arithmetic: h = 6.62607e-34, c = 2.99792458e8.
constexpr double oracle_np_1uw_657 = 1e-6 * 657e-9 / (6.62607e-34 * 2.99792458e8);

SourceConfig pulsed_with_mu(double mu) {
  SourceConfig c;
  c.mode = PumpMode::pulsed;
  c.efficiency = 2e-6;
  c.repetition_rate = 80e6;
  c.pulse_duration = 400e-12;
  c.pump_power = mu * c.repetition_rate * planck * speed_of_light / (c.efficiency * c.pump_wavelength);
  return c;
}

SourceConfig cw_with_rate(double rate) {
  SourceConfig c;
  c.efficiency = 2e-6;
  c.pump_power = rate / c.efficiency * planck * speed_of_light / c.pump_wavelength;
  return c;
}

}  // namespace

TEST_SUITE("source") {

TEST_CASE("pump photon rate") {
  CHECK(pump_photon_rate(1e-6, 657e-9) == doctest::Approx(oracle_np_1uw_657).epsilon(1e-5));
  CHECK(pump_photon_rate(1e-6, 657e-9) == doctest::Approx(3.307e12).epsilon(1e-3));
  CHECK(pump_photon_rate(0.0, 657e-9) == 0.0);
  CHECK(pump_photon_rate(2e-6, 657e-9) == 2.0 * pump_photon_rate(1e-6, 657e-9));
}

TEST_CASE("photons per pulse and the power for 10^6 per pulse") {
  CHECK(photons_per_pulse(4e-6, 80e6, 657e-9) == doctest::Approx(1.654e5).epsilon(1e-3));
  CHECK(photons_per_pulse(0.0, 80e6, 657e-9) == 0.0);
  CHECK(photons_per_pulse(24.2e-6, 80e6, 657e-9) == doctest::Approx(1.0e6).epsilon(1e-2));
}

TEST_CASE("efficiency estimator") {
  CHECK(estimate_efficiency(150e3, 150e3, 1500, 1e-6, 657e-9) ==
        doctest::Approx(2.27e-6).epsilon(1e-3));
  // Closed form evaluated independently.
  CHECK(estimate_efficiency(150e3, 150e3, 1500, 1e-6, 657e-9) ==
        doctest::Approx(150e3 * 150e3 / 3000.0 / oracle_np_1uw_657).epsilon(1e-5));
  const double base = estimate_efficiency(1.2e5, 1.7e5, 900, 1e-6, 657e-9);
  CHECK(estimate_efficiency(2.4e5, 3.4e5, 3600, 1e-6, 657e-9) == doctest::Approx(base).epsilon(1e-14));
  try {
    estimate_efficiency(1e5, 1e5, 0.0, 1e-6, 657e-9);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_estimate);
  }
}

TEST_CASE("zero efficiency emits nothing") {
  auto c = cw_with_rate(1e6);
  c.efficiency = 0.0;
  CHECK(generate_emissions(c, 1e-3, 1).empty());
  auto p = pulsed_with_mu(1.0);
  p.efficiency = 0.0;
  CHECK(generate_pulsed_emissions(p, 1000, 1).empty());
}

TEST_CASE("CW: Poisson count over 1 ms at 6.6 MHz") {
  const auto c = cw_with_rate(6.6e6);
  const auto ev = generate_emissions(c, 1e-3, 42);
  CHECK(std::abs(static_cast<double>(ev.size()) - 6600.0) < 3.0 * std::sqrt(6600.0));
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].time >= ev[i - 1].time);
  for (const auto& e : ev) CHECK(e.pulse_index == -1);
}

TEST_CASE("pulsed: mean pairs per pulse and confinement to the pulse window") {
  const auto c = pulsed_with_mu(2.0);
  CHECK(c.mean_pairs_per_pulse() == doctest::Approx(2.0));
  const std::int64_t pulses = 100000;
  const auto ev = generate_pulsed_emissions(c, pulses, 7);
  const double mean = static_cast<double>(ev.size()) / pulses;
  CHECK(std::abs(mean - 2.0) < 3.0 * std::sqrt(2.0 / pulses));
  for (const auto& e : ev) {
    const double t0 = static_cast<double>(e.pulse_index) * c.period();
    CHECK(e.time >= t0);
    CHECK(e.time < t0 + c.pulse_duration);
  }
  // Variance equals the mean for Poisson pair numbers.
  std::vector<int> per(pulses, 0);
  for (const auto& e : ev) ++per[static_cast<std::size_t>(e.pulse_index)];
  double var = 0.0;
  for (int n : per) var += (n - mean) * (n - mean);
  var /= pulses - 1;
  CHECK(var == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("pulsed thermal statistics: variance mu + mu^2") {
  auto c = pulsed_with_mu(1.0);
  c.statistics = PairStatistics::thermal;
  const std::int64_t pulses = 200000;
  const auto ev = generate_pulsed_emissions(c, pulses, 9);
  std::vector<int> per(pulses, 0);
  for (const auto& e : ev) ++per[static_cast<std::size_t>(e.pulse_index)];
  const double mean = static_cast<double>(ev.size()) / pulses;
  double var = 0.0;
  for (int n : per) var += (n - mean) * (n - mean);
  var /= pulses - 1;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
  CHECK(var == doctest::Approx(2.0).epsilon(0.04));
}

TEST_CASE("thinned stream keeps the expected fraction") {
  const auto c = cw_with_rate(6.6e6);
  auto stream = EmissionStream::cw(c, 10e-3, 3, 0.1);
  std::vector<PairEvent> block;
  std::size_t n = 0;
  while (stream.next(block)) n += block.size();
  CHECK(std::abs(static_cast<double>(n) - 6600.0) < 3.0 * std::sqrt(6600.0));
}

TEST_CASE("reproducible per seed and partitionable by block") {
  const auto c = pulsed_with_mu(0.5);
  const auto a = generate_pulsed_emissions(c, 300000, 11);
  const auto b = generate_pulsed_emissions(c, 300000, 11);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].time == b[i].time);
  const auto other = generate_pulsed_emissions(c, 300000, 12);
  CHECK((other.size() != a.size() || other.front().time != a.front().time));

  // The first block of a longer run equals a run of exactly one block.
  const auto one = generate_pulsed_emissions(c, EmissionStream::pulses_per_block, 5);
  const auto two = generate_pulsed_emissions(c, 2 * EmissionStream::pulses_per_block, 5);
  REQUIRE(two.size() > one.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].time == two[i].time);
}

TEST_CASE("beam splitter: split fraction and same-arm fractions") {
  std::vector<PairEvent> ev(1000000);
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = {static_cast<double>(i) * 1e-9, -1, i};
  const auto s = split_pairs(ev, 1);
  std::vector<int> arm1(ev.size(), 0);
  for (const auto& p : s.arm1) ++arm1[p.pair_id];
  std::size_t split = 0, both1 = 0, both2 = 0;
  for (int k : arm1) {
    if (k == 1) ++split;
    if (k == 2) ++both1;
    if (k == 0) ++both2;
  }
  const double n = static_cast<double>(ev.size());
  CHECK(std::abs(split / n - 0.5) < 0.0015);
  CHECK(std::abs(both1 / n - 0.25) < 3 * std::sqrt(0.25 * 0.75 / n));
  CHECK(std::abs(both2 / n - 0.25) < 3 * std::sqrt(0.25 * 0.75 / n));
  CHECK(s.arm1.size() + s.arm2.size() == 2 * ev.size());

  const auto empty = split_pairs({}, 1);
  CHECK(empty.arm1.empty());
  CHECK(empty.arm2.empty());
}

TEST_CASE("event CSV is time ordered with arm labels") {
  SplitPhotons s;
  s.arm1 = {{1e-9, -1, 0, 0}, {3e-9, -1, 1, 0}};
  s.arm2 = {{2e-9, -1, 0, 1}};
  std::ostringstream out;
  write_events_csv(out, s);
  CHECK(out.str() ==
        "time_ns,pulse_index,pair_id,arm\n1.000000,-1,0,1\n2.000000,-1,0,2\n3.000000,-1,1,1\n");
}

TEST_CASE("samplers: truncated Poisson and geometric means") {
  Rng rng(123);
  for (double lambda : {0.01, 0.5, 3.0, 20.0}) {
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const auto k = sample_truncated_poisson(rng, lambda);
      REQUIRE(k >= 1);
      sum += static_cast<double>(k);
    }
    CHECK(sum / n == doctest::Approx(lambda / -std::expm1(-lambda)).epsilon(0.01));
  }
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_geometric(rng, 0.2));
  CHECK(sum / n == doctest::Approx(4.0).epsilon(0.02));
  CHECK(sample_geometric(rng, 1.0) == 0);
}

TEST_CASE("configuration validation") {
  SourceConfig c;
  c.efficiency = 0.02;
  CHECK_THROWS_AS(c.validate(), Error);
  c.efficiency = 1e-6;
  c.mode = PumpMode::pulsed;
  c.pulse_duration = 20e-9;
  CHECK_THROWS_AS(c.validate(), Error);
}

}  // TEST_SUITE
