#include "pairsim/error.hpp"

namespace pairsim {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::domain: return "domain";
    case Errc::energy_conservation: return "energy_conservation";
    case Errc::no_finite_period: return "no_finite_period";
    case Errc::no_positive_period: return "no_positive_period";
    case Errc::fwhm_undefined: return "fwhm_undefined";
    case Errc::fit_degenerate: return "fit_degenerate";
    case Errc::inversion_domain: return "inversion_domain";
    case Errc::undefined_estimate: return "undefined_estimate";
    case Errc::lookup: return "lookup";
    case Errc::config: return "config";
    case Errc::parse: return "parse";
    case Errc::io: return "io";
  }
  return "unknown";
}

ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::config:
    case Errc::parse:
    case Errc::invalid_argument:
    case Errc::lookup:
      return ErrorCategory::config;
    case Errc::io:
      return ErrorCategory::io;
    case Errc::domain:
    case Errc::energy_conservation:
    case Errc::no_finite_period:
    case Errc::no_positive_period:
    case Errc::fwhm_undefined:
    case Errc::fit_degenerate:
    case Errc::inversion_domain:
    case Errc::undefined_estimate:
      return ErrorCategory::numeric;
  }
  return ErrorCategory::usage;
}

}  // namespace pairsim
