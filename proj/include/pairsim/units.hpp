#pragma once

#include <numbers>

namespace pairsim {

// CODATA 2018 exact values.
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;   // m / s

inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace units {
inline constexpr double ns = 1e-9;
inline constexpr double ps = 1e-12;
inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double cm = 1e-2;
inline constexpr double uW = 1e-6;
inline constexpr double MHz = 1e6;
}  // namespace units

}  // namespace pairsim
