// CODATA 2018 constants and unit conversions

#pragma once

namespace qep {

struct Constants {
    double hbar{1.054571817e-34};   // J s
    double c{299792458.0};          // m / s
    double k_B{1.380649e-23};       // J / K
};

inline constexpr double atomic_mass_unit = 1.66053906660e-27;   // kg
inline constexpr double nuclear_magneton = 5.0507837461e-27;    // J / T
inline constexpr double standard_gravity = 9.80665;             // m / s^2

}  // namespace qep
