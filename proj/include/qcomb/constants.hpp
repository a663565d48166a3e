#pragma once

namespace qcomb::constants {

// CODATA 2018 exact values (SI).
inline constexpr double planck = 6.62607015e-34;       // J s
inline constexpr double boltzmann = 1.380649e-23;      // J / K
inline constexpr double speed_of_light = 299792458.0;  // m / s

inline constexpr double pi = 3.14159265358979323846;

}  // namespace qcomb::constants
