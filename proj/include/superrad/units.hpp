#pragma once

#include <numbers>

namespace superrad {

// Internally every frequency is an angular frequency in rad/s. Configs and
// reports use ordinary frequencies (Hz) and convert at the boundary.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

constexpr double angular_from_hz(double hz) { return kTwoPi * hz; }
constexpr double hz_from_angular(double omega) { return omega / kTwoPi; }

constexpr double tesla_from_millitesla(double mt) { return mt * 1e-3; }
constexpr double millitesla_from_tesla(double t) { return t * 1e3; }

}  // namespace superrad
