#pragma once

#include <stdexcept>
#include <string>

namespace pairsim {

enum class Errc {
  invalid_argument,
  domain,
  energy_conservation,
  no_finite_period,
  no_positive_period,
  fwhm_undefined,
  fit_degenerate,
  inversion_domain,
  undefined_estimate,
  lookup,
  config,
  parse,
  io,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Coarse grouping used for process exit codes and the C status values.
enum class ErrorCategory { usage = 1, config = 2, io = 3, numeric = 4 };

ErrorCategory category_of(Errc code) noexcept;

}  // namespace pairsim
