// SPDX-License-Identifier: Apache-2.0
#include "patchforge/design.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "patchforge/constants.hpp"

namespace pf {

void SubstrateSpec::validate() const {
  if (relative_permittivity < 1.0)
    throw DesignError("substrate relative permittivity must be >= 1");
  if (loss_tangent < 0.0)
    throw DesignError("substrate loss tangent must be >= 0");
  if (!(height_mm > 0.0))
    throw DesignError("substrate height must be > 0");
}

double compute_patch_width(double f_r_hz, double eps_r) {
  if (!(f_r_hz > 0.0)) throw DesignError("resonant frequency must be > 0");
  if (eps_r < 1.0) throw DesignError("relative permittivity must be >= 1");
  return m_to_mm * (c0 / (2.0 * f_r_hz)) * std::sqrt(2.0 / (eps_r + 1.0));
}

double compute_effective_permittivity(double eps_r, double h_mm, double w_mm) {
  if (eps_r < 1.0) throw DesignError("relative permittivity must be >= 1");
  if (!(h_mm > 0.0)) throw DesignError("substrate height must be > 0");
  if (!(w_mm > 0.0)) throw DesignError("patch width must be > 0");
  const double half_sum = (eps_r + 1.0) / 2.0;
  const double half_diff = (eps_r - 1.0) / 2.0;
  return half_sum + half_diff / std::sqrt(1.0 + 12.0 * h_mm / w_mm);
}

double compute_length_extension(double eps_e, double h_mm, double w_mm) {
  if (!(h_mm > 0.0)) throw DesignError("substrate height must be > 0");
  if (!(w_mm > 0.0)) throw DesignError("patch width must be > 0");
  if (!(eps_e > 0.258))
    throw DesignError("effective permittivity <= 0.258 is singular");
  const double ratio = w_mm / h_mm;
  return 0.412 * h_mm * ((eps_e + 0.3) / (eps_e - 0.258)) *
         ((ratio + 0.264) / (ratio + 0.8));
}

double compute_patch_length(double f_r_hz, double eps_e, double dl_mm,
                            LengthModel model) {
  if (!(f_r_hz > 0.0)) throw DesignError("resonant frequency must be > 0");
  if (eps_e < 1.0) throw DesignError("effective permittivity must be >= 1");
  if (dl_mm < 0.0) throw DesignError("length extension must be >= 0");
  const double lambda0_mm = m_to_mm * c0 / f_r_hz;
  const double k = (model == LengthModel::SingleExtension) ? 1.0 : 2.0;
  const double l_mm = lambda0_mm / (2.0 * std::sqrt(eps_e)) - k * dl_mm;
  if (!(l_mm > 0.0)) {
    std::ostringstream os;
    os << "infeasible design: half guided wavelength "
       << lambda0_mm / (2.0 * std::sqrt(eps_e)) << " mm does not exceed the "
       << "fringing extension " << k * dl_mm << " mm";
    throw InfeasibleDesignError(os.str());
  }
  return l_mm;
}

std::pair<double, double> compute_substrate_dims(double l_mm, double w_mm,
                                                 double h_mm) {
  if (!(l_mm > 0.0 && w_mm > 0.0 && h_mm > 0.0))
    throw DesignError("substrate dimensions require positive L, W, h");
  return {l_mm + 6.0 * h_mm, w_mm + 6.0 * h_mm};
}

double compute_substrate_height(double f_r_hz, double eps_r) {
  if (!(f_r_hz > 0.0)) throw DesignError("resonant frequency must be > 0");
  if (eps_r < 1.0) throw DesignError("relative permittivity must be >= 1");
  const double lambda0_mm = m_to_mm * c0 / f_r_hz;
  return 0.0606 * lambda0_mm / std::sqrt(eps_r);
}

PatchDesign design_patch(double f_r_hz, const SubstrateSpec& substrate,
                         std::optional<double> h_override_mm,
                         LengthModel model) {
  substrate.validate();
  const double h_mm = h_override_mm.value_or(
      compute_substrate_height(f_r_hz, substrate.relative_permittivity));
  if (!(h_mm > 0.0)) throw DesignError("substrate height must be > 0");

  PatchDesign d;
  d.resonant_frequency_hz = f_r_hz;
  d.substrate_height_mm = h_mm;
  d.wavelength_mm = m_to_mm * c0 / f_r_hz;
  d.patch_width_mm = compute_patch_width(f_r_hz, substrate.relative_permittivity);
  d.effective_permittivity = compute_effective_permittivity(
      substrate.relative_permittivity, h_mm, d.patch_width_mm);
  d.length_extension_mm =
      compute_length_extension(d.effective_permittivity, h_mm, d.patch_width_mm);
  d.patch_length_mm =
      compute_patch_length(f_r_hz, d.effective_permittivity,
                           d.length_extension_mm, model);
  std::tie(d.substrate_length_mm, d.substrate_width_mm) =
      compute_substrate_dims(d.patch_length_mm, d.patch_width_mm, h_mm);
  return d;
}

namespace {
std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string PatchDesign::to_json_string() const {
  std::ostringstream os;
  os << "{\n"
     << "  \"resonant_frequency_hz\": " << fmt_g17(resonant_frequency_hz) << ",\n"
     << "  \"patch_width_mm\": " << fmt_g17(patch_width_mm) << ",\n"
     << "  \"effective_permittivity\": " << fmt_g17(effective_permittivity) << ",\n"
     << "  \"length_extension_mm\": " << fmt_g17(length_extension_mm) << ",\n"
     << "  \"patch_length_mm\": " << fmt_g17(patch_length_mm) << ",\n"
     << "  \"substrate_length_mm\": " << fmt_g17(substrate_length_mm) << ",\n"
     << "  \"substrate_width_mm\": " << fmt_g17(substrate_width_mm) << ",\n"
     << "  \"substrate_height_mm\": " << fmt_g17(substrate_height_mm) << ",\n"
     << "  \"wavelength_mm\": " << fmt_g17(wavelength_mm) << "\n"
     << "}\n";
  return os.str();
}

}  // namespace pf
