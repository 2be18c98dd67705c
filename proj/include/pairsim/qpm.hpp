#pragma once

// Collinear quasi-phase-matching for degenerate and non-degenerate
// down-conversion in a periodically poled waveguide.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pairsim/error.hpp"

namespace pairsim::qpm {

/// Bulk index n(wavelength [m], temperature [deg C]).
using IndexFunction = std::function<double(double, double)>;

class DispersionModel {
 public:
  DispersionModel(std::string name, IndexFunction bulk_index, double min_wavelength,
                  double max_wavelength, double index_offset = 0.0);

  const std::string& name() const noexcept { return name_; }
  double min_wavelength() const noexcept { return min_wavelength_; }
  double max_wavelength() const noexcept { return max_wavelength_; }
  double index_offset() const noexcept { return index_offset_; }
  bool in_domain(double wavelength) const noexcept;

  /// Effective index: bulk index plus the uniform waveguide offset.
  /// Throws Error(domain) outside the declared wavelength range.
  double n_eff(double wavelength, double temperature) const;

 private:
  std::string name_;
  IndexFunction bulk_index_;
  double min_wavelength_;
  double max_wavelength_;
  double index_offset_;
};

inline constexpr double default_waveguide_offset = 0.03;

/// Temperature-dependent extraordinary index of congruent LiNbO3 (Jundt 1997),
/// valid 0.4-5 um and 20-250 deg C, plus a uniform waveguide offset.
DispersionModel lithium_niobate_extraordinary(double index_offset = default_waveguide_offset);

/// Dispersionless medium; degenerate interactions are matched without a grating.
DispersionModel constant_index(double n, double min_wavelength = 300e-9,
                               double max_wavelength = 5e-6);

/// n = a + b / (wavelength in um)^2.
DispersionModel cauchy_model(double a, double b_um2, double min_wavelength = 300e-9,
                             double max_wavelength = 5e-6);

/// Built-in models by name: "lithium_niobate", "constant", "cauchy".
/// `params` supplies the offset (lithium_niobate), n (constant) or a, b (cauchy).
DispersionModel model_by_name(const std::string& name, std::span<const double> params);

struct PolingSpec {
  double period = 0.0;  ///< [m]; infinity disables the grating term
  double length = 0.0;  ///< [m]
  double temperature = 25.0;  ///< [deg C]

  void validate() const;
};

/// Idler wavelength from energy conservation: 1/l_i = 1/l_p - 1/l_s.
double conjugate_wavelength(double pump, double signal);

/// k_p - k_s - k_i without the grating term [rad/m].
double carrier_mismatch(const DispersionModel& model, double pump, double signal,
                        double temperature);

/// k_p - k_s - k_i - 2 pi / period [rad/m].
double phase_mismatch(const DispersionModel& model, const PolingSpec& spec, double pump,
                      double signal);

/// First-order period 2 pi / (k_p - k_s - k_i).
double solve_poling_period(const DispersionModel& model, double pump, double signal,
                           double temperature);

struct SpectrumPoint {
  double wavelength = 0.0;  ///< signal wavelength [m]
  double intensity = 0.0;   ///< sinc^2(dk L / 2), peak value 1
};

struct Spectrum {
  std::vector<SpectrumPoint> points;
  double fwhm = 0.0;  ///< [m]
};

class FwhmUndefined : public Error {
 public:
  FwhmUndefined(std::vector<SpectrumPoint> partial, const std::string& what)
      : Error(Errc::fwhm_undefined, what), partial_(std::move(partial)) {}
  const std::vector<SpectrumPoint>& partial() const noexcept { return partial_; }

 private:
  std::vector<SpectrumPoint> partial_;
};

/// Intensity on the signal grid and its FWHM around the highest grid point.
/// Throws FwhmUndefined (carrying the points) if the grid does not bracket the
/// half maximum on both sides.
Spectrum pdc_spectrum(const DispersionModel& model, const PolingSpec& spec, double pump,
                      std::span<const double> grid);

/// Evenly spaced grid including both ends.
std::vector<double> linear_grid(double first, double last, std::size_t points);

/// Header `wavelength_nm,intensity`.
void write_spectrum_csv(std::ostream& out, std::span<const SpectrumPoint> points);

}  // namespace pairsim::qpm
