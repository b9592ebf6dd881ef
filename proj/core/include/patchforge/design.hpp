// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "patchforge/errors.hpp"

namespace pf {

// Dielectric substrate description. Lengths in millimeters.
struct SubstrateSpec {
  double relative_permittivity = 2.2;  // eps_r
  double loss_tangent = 0.00009;       // tan(delta)
  double height_mm = 0.766;            // h

  void validate() const;
};

// Which resonant-length model compute_patch_length() uses. The closed-form
// chain subtracts a single fringing extension by default; the two-sided
// variant exists for the transmission-line cross-checks in oracles.
enum class LengthModel {
  SingleExtension,  // L = lambda0 / (2 sqrt(eps_e)) - dl
  DoubleExtension,  // L = lambda0 / (2 sqrt(eps_e)) - 2 dl
};

// Full record of the closed-form rectangular-patch design chain.
// All lengths in millimeters, frequency in hertz.
struct PatchDesign {
  double resonant_frequency_hz = 0.0;
  double patch_width_mm = 0.0;        // W
  double effective_permittivity = 0.0;
  double length_extension_mm = 0.0;   // dl
  double patch_length_mm = 0.0;       // L
  double substrate_length_mm = 0.0;   // Ls = L + 6h
  double substrate_width_mm = 0.0;    // Ws = W + 6h
  double wavelength_mm = 0.0;         // lambda0 = c / fr
  double substrate_height_mm = 0.0;   // h actually used by the chain

  std::string to_json_string() const;
};

// Individual design equations. Preconditions throw DesignError; a patch
// length that comes out non-positive throws InfeasibleDesignError.
double compute_patch_width(double f_r_hz, double eps_r);
double compute_effective_permittivity(double eps_r, double h_mm, double w_mm);
double compute_length_extension(double eps_e, double h_mm, double w_mm);
double compute_patch_length(double f_r_hz, double eps_e, double dl_mm,
                            LengthModel model = LengthModel::SingleExtension);
std::pair<double, double> compute_substrate_dims(double l_mm, double w_mm,
                                                 double h_mm);
double compute_substrate_height(double f_r_hz, double eps_r);

// Chains the equations: width -> effective permittivity -> extension ->
// length -> substrate dims. When h_override_mm is absent the substrate
// height comes from the closed-form height rule, not from `substrate`.
PatchDesign design_patch(double f_r_hz, const SubstrateSpec& substrate,
                         std::optional<double> h_override_mm = std::nullopt,
                         LengthModel model = LengthModel::SingleExtension);

}  // namespace pf
