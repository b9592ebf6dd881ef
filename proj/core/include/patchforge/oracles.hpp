// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "patchforge/errors.hpp"

namespace pf::oracles {

// Closed rectangular PEC cavity, interior a x b x d (mm), mode (m, n, p).
struct CavitySpec {
  double a_mm = 0.0;
  double b_mm = 0.0;
  double d_mm = 0.0;
  int m = 1;
  int n = 0;
  int p = 1;
};

// Eigenfrequency of the (m, n, p) mode in hertz.
// At most one of m, n, p may be zero.
double cavity_resonance(const CavitySpec& spec);

// Transmission-line estimate of a patch's resonant frequency, both with the
// single fringing extension used by the design chain and with the two-sided
// extension of the standard model.
struct PatchResonance {
  double single_extension_hz = 0.0;  // f = c / (2 (L + dl) sqrt(eps_e))
  double double_extension_hz = 0.0;  // f = c / (2 (L + 2 dl) sqrt(eps_e))
};
PatchResonance tline_patch_resonance(double l_mm, double dl_mm, double eps_e);

enum class DipoleKind { Hertzian, HalfWave };

// Peak directivity (linear, dimensionless): 1.5 for an ideal current
// element, 1.643 for the half-wave dipole.
double dipole_directivity(DipoleKind kind);

}  // namespace pf::oracles
