#pragma once

namespace sotdtco {

// CODATA 2018 exact / recommended values
namespace phys {
inline constexpr double e = 1.602176634e-19;      // C
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double k_b = 1.380649e-23;      // J/K
inline constexpr double pi = 3.14159265358979323846;
}  // namespace phys

/// 365.25-day year in seconds (rounded).
inline constexpr double kSecondsPerYear = 3.15576e7;

}  // namespace sotdtco
