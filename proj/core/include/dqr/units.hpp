#pragma once

#include <numbers>

namespace dqr {

// All frequencies are stored as angular frequencies (rad/s) and all rates in 1/s.
// Configuration files quote ordinary frequencies (omega / 2 pi), the way they are
// usually read off a spectrum analyzer.

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduced Planck constant, CODATA 2018 (J s).
inline constexpr double kHbar = 1.054571817e-34;

constexpr double angular_from_ghz(double f_ghz) { return kTwoPi * f_ghz * 1e9; }
constexpr double angular_from_mhz(double f_mhz) { return kTwoPi * f_mhz * 1e6; }
constexpr double ghz_from_angular(double omega) { return omega / kTwoPi / 1e9; }
constexpr double mhz_from_angular(double omega) { return omega / kTwoPi / 1e6; }

}  // namespace dqr
