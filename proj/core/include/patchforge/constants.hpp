// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace pf {

// Physical constants (SI).
inline constexpr double c0 = 2.99792458e8;        // speed of light, m/s
inline constexpr double eps0 = 8.8541878128e-12;  // vacuum permittivity, F/m
inline constexpr double mu0 = 1.25663706212e-6;   // vacuum permeability, H/m
inline constexpr double eta0 = 376.730313668;     // free-space impedance, Ohm
inline constexpr double pi = 3.14159265358979323846;

inline constexpr double mm_to_m = 1e-3;
inline constexpr double m_to_mm = 1e3;

}  // namespace pf
