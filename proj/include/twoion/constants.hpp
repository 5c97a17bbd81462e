#pragma once

// CODATA 2018 values.
namespace twoion::constants {

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double epsilon0 = 8.8541878128e-12;     // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

inline constexpr double ca40_mass_amu = 39.9625909;

}  // namespace twoion::constants
