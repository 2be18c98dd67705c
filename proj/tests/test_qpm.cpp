#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pairsim/error.hpp"
#include "pairsim/qpm.hpp"

using namespace pairsim;
using namespace pairsim::qpm;

// Reference values: tests/oracles/qpm_oracle.py (mpmath, 40 digits).
namespace oracle {
constexpr double conjugate_657_1000_nm = 1915.451895043732;
constexpr double cauchy_period_degenerate_um = 0.756249048;
constexpr double cauchy_period_1200_um = 0.7631363535911602;
constexpr double ln_period_degenerate_um = 12.405588036904254;
constexpr double ln_period_1200_um = 12.481349384408218;
constexpr double ln_neff_1314_100c = 2.1785170433928118;
constexpr double ln_fwhm_degenerate_nm = 41.962284524597491;
}  // namespace oracle

namespace {

constexpr double pump = 657e-9;
const double infinite = std::numeric_limits<double>::infinity();

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io;
}

}  // namespace

TEST_SUITE("qpm") {

TEST_CASE("conjugate wavelength from energy conservation") {
  CHECK(conjugate_wavelength(657e-9, 1314e-9) == doctest::Approx(1314e-9).epsilon(1e-14));
  CHECK(conjugate_wavelength(657e-9, 1000e-9) / 1e-9 ==
        doctest::Approx(oracle::conjugate_657_1000_nm).epsilon(1e-12));
  for (double s : {700e-9, 1000e-9, 1314e-9, 1550e-9, 3000e-9}) {
    const double i = conjugate_wavelength(pump, s);
    CHECK(conjugate_wavelength(pump, i) == doctest::Approx(s).epsilon(1e-13));
    CHECK(i > pump);
    CHECK(std::abs(1 / pump - 1 / s - 1 / i) < 1e-9);
  }
  CHECK(code_of([] { conjugate_wavelength(657e-9, 600e-9); }) == Errc::energy_conservation);
  CHECK(code_of([] { conjugate_wavelength(657e-9, 657e-9); }) == Errc::energy_conservation);
}

TEST_CASE("constant index: degeneracy cancels, only the grating survives") {
  const auto m = constant_index(2.2);
  PolingSpec none{infinite, 0.01, 25.0};
  CHECK(phase_mismatch(m, none, pump, 2 * pump) == 0.0);
  PolingSpec grating{12.1e-6, 0.01, 25.0};
  CHECK(phase_mismatch(m, grating, pump, 2 * pump) ==
        doctest::Approx(-2 * std::numbers::pi / 12.1e-6).epsilon(1e-12));
  CHECK(phase_mismatch(m, grating, pump, 2 * pump) == doctest::Approx(-5.193e5).epsilon(1e-3));
  CHECK(code_of([&] { solve_poling_period(m, pump, 2 * pump, 25.0); }) == Errc::no_finite_period);
}

TEST_CASE("toy Cauchy model: period against the closed form") {
  const auto m = cauchy_model(2.2, 0.5);
  const double degenerate = solve_poling_period(m, pump, 2 * pump, 25.0);
  CHECK(degenerate / 1e-6 == doctest::Approx(oracle::cauchy_period_degenerate_um).epsilon(1e-10));
  const double off = solve_poling_period(m, pump, 1200e-9, 25.0);
  CHECK(off / 1e-6 == doctest::Approx(oracle::cauchy_period_1200_um).epsilon(1e-10));
  // Period is 2 pi over the carrier mismatch.
  CHECK(degenerate ==
        doctest::Approx(2 * std::numbers::pi / carrier_mismatch(m, pump, 2 * pump, 25.0)));
}

TEST_CASE("solve then re-substitute leaves |dk| < 1e-6 rad/m on every test model") {
  const DispersionModel models[] = {cauchy_model(2.2, 0.5), cauchy_model(1.9, 0.02),
                                    lithium_niobate_extraordinary(),
                                    lithium_niobate_extraordinary(0.0)};
  for (const auto& m : models) {
    for (double s : {1000e-9, 1200e-9, 1314e-9, 1500e-9}) {
      for (double t : {25.0, 100.0}) {
        const double period = solve_poling_period(m, pump, s, t);
        CHECK(std::abs(phase_mismatch(m, {period, 0.032, t}, pump, s)) < 1e-6);
      }
    }
  }
}

TEST_CASE("negative carrier mismatch has no positive period") {
  // Anomalous dispersion: index falls towards the pump.
  DispersionModel anomalous("anomalous", [](double wl, double) { return 2.0 + 0.1 * wl / 1e-6; },
                            300e-9, 5e-6);
  CHECK(code_of([&] { solve_poling_period(anomalous, pump, 1200e-9, 25.0); }) ==
        Errc::no_positive_period);
}

TEST_CASE("signal and idler roles give equal mismatch") {
  const auto m = lithium_niobate_extraordinary();
  PolingSpec spec{12.4e-6, 0.032, 100.0};
  for (double s : {1100e-9, 1250e-9, 1400e-9}) {
    const double i = conjugate_wavelength(pump, s);
    CHECK(std::abs(phase_mismatch(m, spec, pump, s) - phase_mismatch(m, spec, pump, i)) < 1e-9);
  }
}

TEST_CASE("built-in lithium niobate model") {
  const auto m = lithium_niobate_extraordinary();
  CHECK(m.n_eff(1314e-9, 100.0) == doctest::Approx(oracle::ln_neff_1314_100c).epsilon(1e-12));
  for (double wl = 400e-9; wl <= 2000e-9; wl += 50e-9) CHECK(m.n_eff(wl, 100.0) > 1.0);
  CHECK(code_of([&] { m.n_eff(350e-9, 100.0); }) == Errc::domain);
  const double period = solve_poling_period(m, pump, 2 * pump, 100.0);
  CHECK(period / 1e-6 == doctest::Approx(oracle::ln_period_degenerate_um).epsilon(1e-9));
  CHECK(period > 10e-6);
  CHECK(period < 14e-6);
  CHECK(solve_poling_period(m, pump, 1200e-9, 100.0) / 1e-6 ==
        doctest::Approx(oracle::ln_period_1200_um).epsilon(1e-9));
}

TEST_CASE("spectrum: unit peak at phase matching, FWHM near the oracle") {
  const auto m = lithium_niobate_extraordinary();
  PolingSpec spec{solve_poling_period(m, pump, 2 * pump, 100.0), 0.032, 100.0};
  const auto grid = linear_grid(1194e-9, 1434e-9, 2401);
  const auto s = pdc_spectrum(m, spec, pump, grid);
  double peak = 0.0;
  for (const auto& p : s.points) peak = std::max(peak, p.intensity);
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
  // Linear interpolation on a 0.1 nm grid.
  CHECK(s.fwhm / 1e-9 == doctest::Approx(oracle::ln_fwhm_degenerate_nm).epsilon(1e-4));
  CHECK(std::abs(s.fwhm / 1e-9 - 40.0) <= 15.0);
}

TEST_CASE("spectrum depends on wavelength only through dk") {
  const auto m = lithium_niobate_extraordinary();
  PolingSpec spec{12.3e-6, 0.032, 100.0};
  auto points = [&](std::vector<double> grid) {
    try {
      return pdc_spectrum(m, spec, pump, grid).points;
    } catch (const FwhmUndefined& e) {
      return e.partial();
    }
  };
  const auto s = points({1250e-9, 1270e-9, 1300e-9});
  const auto t = points({conjugate_wavelength(pump, 1250e-9), 1271e-9,
                         conjugate_wavelength(pump, 1300e-9)});
  REQUIRE(s.size() == 3);
  REQUIRE(t.size() == 3);
  CHECK(s[0].intensity == doctest::Approx(t[0].intensity).epsilon(1e-12));
  CHECK(s[2].intensity == doctest::Approx(t[2].intensity).epsilon(1e-12));
  CHECK(s[0].intensity != doctest::Approx(s[2].intensity));
}

TEST_CASE("FWHM(2L) / FWHM(L) is about one half away from degeneracy") {
  const auto m = lithium_niobate_extraordinary();
  const double signal = 1200e-9;
  const double period = solve_poling_period(m, pump, signal, 100.0);
  const auto grid = linear_grid(1185e-9, 1215e-9, 6001);
  const auto one = pdc_spectrum(m, {period, 0.032, 100.0}, pump, grid);
  const auto two = pdc_spectrum(m, {period, 0.064, 100.0}, pump, grid);
  const double ratio = two.fwhm / one.fwhm;
  CHECK(ratio >= 0.4);
  CHECK(ratio <= 0.6);
  CHECK(ratio == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("coarse grid: FWHM undefined, partial spectrum carried") {
  const auto m = lithium_niobate_extraordinary();
  PolingSpec spec{solve_poling_period(m, pump, 2 * pump, 100.0), 0.032, 100.0};
  const auto grid = linear_grid(1310e-9, 1318e-9, 9);
  try {
    pdc_spectrum(m, spec, pump, grid);
    FAIL("expected FwhmUndefined");
  } catch (const FwhmUndefined& e) {
    CHECK(e.code() == Errc::fwhm_undefined);
    CHECK(e.partial().size() == 9);
  }
}

TEST_CASE("spectrum CSV header and rows") {
  std::ostringstream out;
  std::vector<SpectrumPoint> pts{{1314e-9, 1.0}, {1315e-9, 0.5}};
  write_spectrum_csv(out, pts);
  CHECK(out.str().rfind("wavelength_nm,intensity\n1314,1\n", 0) == 0);
}

TEST_CASE("models by name") {
  const std::vector<double> none;
  CHECK(model_by_name("lithium_niobate", none).index_offset() == 0.03);
  CHECK(model_by_name("constant", std::vector<double>{2.0}).n_eff(1e-6, 25) == 2.0);
  CHECK_THROWS_AS(model_by_name("glass", none), Error);
}

}  // TEST_SUITE
