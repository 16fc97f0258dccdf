#pragma once

// Unit conventions used throughout:
//   time              microseconds (us)
//   angular frequency rad/us
//   magnetic field    gauss
// Configuration and all public quotes use plain frequencies in MHz
// ("mhz_over_2pi" keys); the 2*pi conversion happens exactly once,
// at this boundary.

#include <cmath>
#include <complex>

namespace biphoton {

using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Bohr magneton over Planck constant, MHz per gauss. Named so tests can
// pin it; overridable through ZeemanConfig.
inline constexpr double bohr_magneton_mhz_per_gauss = 1.3996;

// MHz (ordinary frequency) -> rad/us (angular).
inline constexpr double angular(double f_mhz) { return two_pi * f_mhz; }

// rad/us -> MHz.
inline constexpr double ordinary(double w_rad_per_us) { return w_rad_per_us / two_pi; }

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double phi) {
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

} // namespace biphoton
