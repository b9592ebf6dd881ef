// SPDX-License-Identifier: Apache-2.0
#include "patchforge/oracles.hpp"

#include <cmath>

#include "patchforge/constants.hpp"

namespace pf::oracles {

double cavity_resonance(const CavitySpec& spec) {
  if (!(spec.a_mm > 0.0 && spec.b_mm > 0.0 && spec.d_mm > 0.0))
    throw Error("cavity dimensions must be positive");
  if (spec.m < 0 || spec.n < 0 || spec.p < 0)
    throw Error("cavity mode indices must be non-negative");
  const int zeros = (spec.m == 0) + (spec.n == 0) + (spec.p == 0);
  if (zeros > 1) throw Error("at most one cavity mode index may be zero");
  if (spec.m == 0 && spec.n == 0 && spec.p == 0)
    throw Error("all-zero cavity mode is not a resonance");
  const double a = spec.a_mm * mm_to_m;
  const double b = spec.b_mm * mm_to_m;
  const double d = spec.d_mm * mm_to_m;
  const double kx = spec.m / a;
  const double ky = spec.n / b;
  const double kz = spec.p / d;
  return (c0 / 2.0) * std::sqrt(kx * kx + ky * ky + kz * kz);
}

PatchResonance tline_patch_resonance(double l_mm, double dl_mm, double eps_e) {
  if (!(l_mm > 0.0) || dl_mm < 0.0 || !(eps_e > 0.0))
    throw Error("patch resonance needs L > 0, dl >= 0, eps_e > 0");
  const double root = std::sqrt(eps_e);
  PatchResonance r;
  r.single_extension_hz = c0 / (2.0 * (l_mm + dl_mm) * mm_to_m * root);
  r.double_extension_hz = c0 / (2.0 * (l_mm + 2.0 * dl_mm) * mm_to_m * root);
  return r;
}

double dipole_directivity(DipoleKind kind) {
  switch (kind) {
    case DipoleKind::Hertzian:
      return 1.5;
    case DipoleKind::HalfWave:
      return 1.643;
  }
  throw Error("unknown dipole kind");
}

}  // namespace pf::oracles
