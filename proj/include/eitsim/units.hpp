#pragma once

#include <numbers>

namespace eitsim {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double speed_of_light = 299792458.0;    // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg
inline constexpr double celsius_zero = 273.15;           // K
}  // namespace constants

/// Rb-87 D1 line data used by the built-in presets.
namespace rb87 {
inline constexpr double mass = 86.909180527 * constants::atomic_mass_unit;
inline constexpr double d1_wavelength = 794.978851156e-9;
/// Natural linewidth of 5P_1/2 divided by 2pi (Hz).
inline constexpr double d1_natural_width_hz = 5.7500e6;
/// Reduced dipole matrix element <J=1/2||er||J'=1/2> (C m).
inline constexpr double d1_dipole_moment = 2.537e-29;
}  // namespace rb87

/// Converts a frequency quoted as f = omega/2pi (Hz) to angular units (rad/s).
constexpr double angular(double hz) { return constants::two_pi * hz; }

/// Inverse of angular().
constexpr double hertz(double rad_per_s) { return rad_per_s / constants::two_pi; }

}  // namespace eitsim
