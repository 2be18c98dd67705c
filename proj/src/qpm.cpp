#include "pairsim/qpm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "pairsim/units.hpp"

namespace pairsim::qpm {

DispersionModel::DispersionModel(std::string name, IndexFunction bulk_index, double min_wavelength,
                                 double max_wavelength, double index_offset)
    : name_(std::move(name)),
      bulk_index_(std::move(bulk_index)),
      min_wavelength_(min_wavelength),
      max_wavelength_(max_wavelength),
      index_offset_(index_offset) {
  if (!(min_wavelength > 0.0 && max_wavelength > min_wavelength))
    throw Error(Errc::invalid_argument, "dispersion model '" + name_ + "' has an empty domain");
  if (!std::isfinite(index_offset))
    throw Error(Errc::invalid_argument, "index offset must be finite");
}

bool DispersionModel::in_domain(double wavelength) const noexcept {
  return wavelength >= min_wavelength_ && wavelength <= max_wavelength_;
}

double DispersionModel::n_eff(double wavelength, double temperature) const {
  if (!in_domain(wavelength)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "wavelength %.6g nm outside the %s domain [%.6g, %.6g] nm",
                  wavelength / units::nm, name_.c_str(), min_wavelength_ / units::nm,
                  max_wavelength_ / units::nm);
    throw Error(Errc::domain, buf);
  }
  return bulk_index_(wavelength, temperature) + index_offset_;
}

DispersionModel lithium_niobate_extraordinary(double index_offset) {
  // D. H. Jundt, Opt. Lett. 22, 1553 (1997); wavelength in um.
  auto index = [](double wavelength, double temperature) {
    constexpr double a1 = 5.35583, a2 = 0.100473, a3 = 0.20692, a4 = 100.0, a5 = 11.34927,
                     a6 = 1.5334e-2;
    constexpr double b1 = 4.629e-7, b2 = 3.862e-8, b3 = -0.89e-8, b4 = 2.657e-5;
    const double f = (temperature - 24.5) * (temperature + 570.82);
    const double l2 = std::pow(wavelength / units::um, 2);
    const double pole = a3 + b3 * f;
    const double n2 = a1 + b1 * f + (a2 + b2 * f) / (l2 - pole * pole) +
                      (a4 + b4 * f) / (l2 - a5 * a5) - a6 * l2;
    return std::sqrt(n2);
  };
  return DispersionModel("lithium_niobate", index, 400e-9, 5e-6, index_offset);
}

DispersionModel constant_index(double n, double min_wavelength, double max_wavelength) {
  if (!(n > 1.0)) throw Error(Errc::invalid_argument, "constant index must exceed 1");
  return DispersionModel("constant", [n](double, double) { return n; }, min_wavelength,
                         max_wavelength);
}

DispersionModel cauchy_model(double a, double b_um2, double min_wavelength, double max_wavelength) {
  return DispersionModel(
      "cauchy",
      [a, b_um2](double wavelength, double) {
        const double l = wavelength / units::um;
        return a + b_um2 / (l * l);
      },
      min_wavelength, max_wavelength);
}

DispersionModel model_by_name(const std::string& name, std::span<const double> params) {
  if (name == "lithium_niobate")
    return lithium_niobate_extraordinary(params.empty() ? default_waveguide_offset : params[0]);
  if (name == "constant") return constant_index(params.empty() ? 2.2 : params[0]);
  if (name == "cauchy") {
    if (params.size() < 2) return cauchy_model(2.2, 0.5);
    return cauchy_model(params[0], params[1]);
  }
  throw Error(Errc::invalid_argument, "unknown dispersion model '" + name + "'");
}

void PolingSpec::validate() const {
  if (!(period > 0.0)) throw Error(Errc::invalid_argument, "poling period must be positive");
  if (!(length > 0.0 && std::isfinite(length)))
    throw Error(Errc::invalid_argument, "crystal length must be positive");
  if (!std::isfinite(temperature)) throw Error(Errc::invalid_argument, "temperature must be finite");
}

double conjugate_wavelength(double pump, double signal) {
  if (!(pump > 0.0) || !std::isfinite(signal))
    throw Error(Errc::invalid_argument, "wavelengths must be positive");
  if (!(signal > pump))
    throw Error(Errc::energy_conservation,
                "signal wavelength must exceed the pump wavelength (energy conservation)");
  return 1.0 / (1.0 / pump - 1.0 / signal);
}

namespace {

// Signal and idler enter through |1/l_s - 1/(2 l_p)| only, so the two roles
// give bit-identical results.
double carrier_mismatch_impl(const DispersionModel& model, double pump, double signal,
                             double temperature) {
  conjugate_wavelength(pump, signal);
  const double inv_p = 1.0 / pump;
  const double detune = std::abs(1.0 / signal - 0.5 * inv_p);
  const double inv_s = 0.5 * inv_p + detune;
  const double inv_i = 0.5 * inv_p - detune;
  if (!(inv_i > 0.0))
    throw Error(Errc::energy_conservation, "signal too close to the pump wavelength");
  const double n_p = model.n_eff(pump, temperature);
  const double n_s = model.n_eff(1.0 / inv_s, temperature);
  const double n_i = model.n_eff(1.0 / inv_i, temperature);
  return two_pi * (n_p * inv_p - n_s * inv_s - n_i * inv_i);
}

}  // namespace

double carrier_mismatch(const DispersionModel& model, double pump, double signal,
                        double temperature) {
  return carrier_mismatch_impl(model, pump, signal, temperature);
}

double phase_mismatch(const DispersionModel& model, const PolingSpec& spec, double pump,
                      double signal) {
  if (!(spec.period > 0.0)) throw Error(Errc::invalid_argument, "poling period must be positive");
  const double grating = std::isinf(spec.period) ? 0.0 : two_pi / spec.period;
  return carrier_mismatch_impl(model, pump, signal, spec.temperature) - grating;
}

double solve_poling_period(const DispersionModel& model, double pump, double signal,
                           double temperature) {
  const double mismatch = carrier_mismatch_impl(model, pump, signal, temperature);
  const double scale = two_pi * model.n_eff(pump, temperature) / pump;
  if (std::abs(mismatch) <= 1e-12 * scale)
    throw Error(Errc::no_finite_period,
                "interaction is phase matched without a grating; no finite poling period");
  if (mismatch < 0.0)
    throw Error(Errc::no_positive_period,
                "k_p - k_s - k_i is negative; no positive first-order poling period");
  return two_pi / mismatch;
}

std::vector<double> linear_grid(double first, double last, std::size_t points) {
  if (points < 2) throw Error(Errc::invalid_argument, "grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

Spectrum pdc_spectrum(const DispersionModel& model, const PolingSpec& spec, double pump,
                      std::span<const double> grid) {
  spec.validate();
  if (grid.size() < 3) throw Error(Errc::invalid_argument, "spectrum grid needs at least 3 points");

  Spectrum out;
  out.points.reserve(grid.size());
  for (double wl : grid) {
    const double x = 0.5 * phase_mismatch(model, spec, pump, wl) * spec.length;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    out.points.push_back({wl, sinc * sinc});
  }

  const auto& pts = out.points;
  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(pts.begin(), pts.end(),
                       [](auto& a, auto& b) { return a.intensity < b.intensity; }) -
      pts.begin());
  const double half = 0.5 * pts[peak].intensity;

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const auto& a = pts[inside];
    const auto& b = pts[outside];
    const double t = (a.intensity - half) / (a.intensity - b.intensity);
    return a.wavelength + t * (b.wavelength - a.wavelength);
  };

  std::size_t left = peak;
  while (left > 0 && pts[left - 1].intensity >= half) --left;
  std::size_t right = peak;
  while (right + 1 < pts.size() && pts[right + 1].intensity >= half) ++right;
  if (left == 0 || right + 1 == pts.size())
    throw FwhmUndefined(out.points, "spectrum grid does not bracket the half maximum");

  out.fwhm = std::abs(crossing(right, right + 1) - crossing(left, left - 1));
  return out;
}

void write_spectrum_csv(std::ostream& out, std::span<const SpectrumPoint> points) {
  out << "wavelength_nm,intensity\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.10g,%.12g\n", p.wavelength / units::nm, p.intensity);
    out << buf;
  }
}

}  // namespace pairsim::qpm
