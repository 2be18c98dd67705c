#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pairsim/analyze.hpp"
#include "pairsim/error.hpp"

using namespace pairsim;
using namespace pairsim::analyze;
using std::numbers::pi;

namespace {

std::vector<ScanPoint> fringe(double r0, double v, double offset, int points) {
  std::vector<ScanPoint> scan;
  for (int i = 0; i < points; ++i) {
    const double phi = 2.0 * pi * i / points;
    scan.push_back({phi, r0 * (1.0 + v * std::cos(phi + offset))});
  }
  return scan;
}

PeakSet peaks_with_ratio(double central, double satellite) {
  PeakSet p;
  p.expected_spacing = 12.5e-9;
  p.peaks = {{-12.5e-9, satellite}, {0.0, central}, {12.5e-9, satellite}};
  return p;
}

}  // namespace

TEST_SUITE("analyze") {

TEST_CASE("find_peaks: three synthetic peaks") {
  auto h = detect::make_histogram(60e-9, 0.1e-9);
  for (auto& c : h.counts) c = 4;
  for (std::size_t i : {50u, 175u, 300u}) h.counts[i] = 1000;
  const auto p = find_peaks(h, 12.5e-9);
  REQUIRE(p.peaks.size() == 3);
  CHECK(std::abs(p.peaks[0].position - 5.05e-9) < 0.1e-9);
  CHECK(std::abs(p.peaks[1].position - 17.55e-9) < 0.1e-9);
  CHECK(std::abs(p.peaks[2].position - 30.05e-9) < 0.1e-9);
  CHECK(p.mean_spacing() == doctest::Approx(12.5e-9).epsilon(0.01));
  // Area includes the flat floor over +-spacing/4.
  CHECK(p.peaks[1].area == doctest::Approx(1000.0 + 4.0 * 62.0).epsilon(0.01));
}

TEST_CASE("find_peaks: flat or empty data give no peaks") {
  auto h = detect::make_histogram(60e-9, 0.1e-9);
  CHECK(find_peaks(h, 12.5e-9).empty());
  for (auto& c : h.counts) c = 100;
  CHECK(find_peaks(h, 12.5e-9).empty());
  CHECK_THROWS_AS(find_peaks(h, 0.15e-9), Error);
}

TEST_CASE("find_peaks: a close lower maximum is suppressed") {
  std::vector<double> v(200, 0.0);
  v[50] = 100;
  v[55] = 80;
  v[150] = 90;
  const auto p = find_peaks(v, 0.0, 1.0, 40.0);
  REQUIRE(p.peaks.size() == 2);
  CHECK(p.central_index() == 0);
}

TEST_CASE("pile-up correction") {
  auto h = detect::make_histogram(4e-9, 1e-9);
  h.counts = {10, 20, 30, 40};
  h.starts = 100;
  const auto c = correct_pileup(h);
  CHECK(c[0] == doctest::Approx(10.0));
  CHECK(c[1] == doctest::Approx(100.0 * 20 / 90));
  CHECK(c[2] == doctest::Approx(100.0 * 30 / 70));
  CHECK(c[3] == doctest::Approx(100.0 * 40 / 40));
  h.starts = 0;
  CHECK(correct_pileup(h)[3] == 40.0);
}

TEST_CASE("infer_mu") {
  auto m = infer_mu(peaks_with_ratio(100.0, 0.0));
  CHECK(m.mu == 0.0);
  CHECK(m.ratio == 0.0);
  m = infer_mu(peaks_with_ratio(100.0, 50.0));
  CHECK(m.mu == doctest::Approx(1.0));
  CHECK(m.ratio == doctest::Approx(0.5));
  m = infer_mu(peaks_with_ratio(300.0, 200.0));
  CHECK(m.mu == doctest::Approx(2.0));
  CHECK(infer_mu(peaks_with_ratio(100.0, 50.0), PairSplitting::beamsplitter).mu ==
        doctest::Approx(0.5));
  try {
    infer_mu(peaks_with_ratio(100.0, 100.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::inversion_domain);
  }
  PeakSet lone;
  lone.peaks = {{0.0, 10.0}};
  CHECK_THROWS_AS(infer_mu(lone), Error);
}

TEST_CASE("fit_visibility: noiseless fringe") {
  const auto f = fit_visibility(fringe(100.0, 0.97, 0.3, 8));
  CHECK(std::abs(f.visibility - 0.97) < 1e-9);
  CHECK(f.baseline == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(f.phase_offset == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(f.max_residual < 1e-9);
  CHECK(f.sigma > 0.0);
}

TEST_CASE("fit_visibility: constant counts give zero visibility") {
  const auto f = fit_visibility(fringe(50.0, 0.0, 0.0, 8));
  CHECK(std::abs(f.visibility) < 1e-12);
  CHECK(f.sigma > 0.0);
}

TEST_CASE("fit_visibility: sigma shrinks as counts grow") {
  const auto small = fit_visibility(fringe(100.0, 0.9, 0.0, 16));
  const auto large = fit_visibility(fringe(10000.0, 0.9, 0.0, 16));
  CHECK(large.sigma == doctest::Approx(small.sigma / 10.0).epsilon(1e-6));
}

TEST_CASE("fit_visibility: degenerate inputs") {
  std::vector<ScanPoint> same(8, ScanPoint{1.0, 10.0});
  try {
    fit_visibility(same);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::fit_degenerate);
  }
  CHECK_THROWS_AS(fit_visibility(fringe(10.0, 0.5, 0.0, 3)), Error);
  std::vector<ScanPoint> narrow{{0.0, 1.0}, {0.5, 2.0}, {1.0, 3.0}, {1.5, 4.0}};
  CHECK_THROWS_AS(fit_visibility(narrow), Error);
}

TEST_CASE("accidental subtraction") {
  const auto raw = fringe(1000.0, 0.92, 0.0, 16);
  const auto fit = fit_visibility(raw);
  const auto none = subtract_accidentals(raw, 0.0, 1e5, 1e-9, 1.0);
  CHECK(none.fit.visibility == doctest::Approx(fit.visibility).epsilon(1e-12));
  CHECK(none.accidental_counts == 0.0);

  // Accidental fraction 0.0543 of the signal baseline.
  const double signal = 1000.0 / 1.0543;
  const double acc = 1000.0 - signal;
  const auto net = subtract_accidentals(raw, acc, 1.0, 1.0, 1.0);
  CHECK(net.fit.visibility == doctest::Approx(0.92 * 1.0543).epsilon(1e-9));
  CHECK(net.fit.visibility == doctest::Approx(0.970).epsilon(1e-3));
  CHECK(net.fit.visibility >= fit.visibility);
  CHECK_FALSE(net.clamped);

  const auto from_fit = subtract_accidentals(fit, acc, 1.0, 1.0, 1.0);
  CHECK(from_fit.fit.visibility == doctest::Approx(net.fit.visibility).epsilon(1e-9));

  CHECK(net_visibility(0.92, 0.0543) == doctest::Approx(0.970).epsilon(1e-3));
  CHECK(net_visibility(0.92, 0.0) == 0.92);
  CHECK_THROWS_AS(net_visibility(0.92, -0.1), Error);
  CHECK_THROWS_AS(subtract_accidentals(raw, -1.0, 1.0, 1.0, 1.0), Error);
}

TEST_CASE("accidental subtraction clamps negative points") {
  const auto raw = fringe(100.0, 0.9, 0.0, 8);
  const auto net = subtract_accidentals(raw, 20.0, 1.0, 1.0, 1.0);
  CHECK(net.clamped);
  for (double v : {0.0, 0.5, 0.9})
    for (double ratio : {0.0, 0.01, 0.2})
      CHECK(net_visibility(v, ratio) >= v);
}

TEST_CASE("Bell significance") {
  const auto b = bell_significance(0.92, 0.01);
  CHECK(b.sigmas == doctest::Approx(21.29).epsilon(1e-3));
  CHECK(b.sigmas >= 21.0);
  CHECK(b.violates());
  CHECK(bell_significance(bell_visibility_bound, 0.02).sigmas == 0.0);
  const auto tb = bell_significance(0.84, 0.01);
  CHECK(tb.chsh == doctest::Approx(2.376).epsilon(1e-3));
  CHECK(tb.violates());
  CHECK_FALSE(bell_significance(0.5, 0.01).violates());
  CHECK(bell_significance(0.93, 0.01).sigmas > b.sigmas);
  CHECK(bell_significance(0.92, 0.02).sigmas < b.sigmas);
  CHECK_THROWS_AS(bell_significance(0.9, 0.0), Error);
}

}  // TEST_SUITE
