// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "patchforge/geometry.hpp"
#include "patchforge/solver.hpp"

namespace pf::presets {

// Parameter set of the bundled double-T 3x3 reference design. Defaults are
// the optimized values the design ships with.
struct ReferenceDesign {
  double patch_length_mm = 6.23;  // L, along y
  double patch_width_mm = 7.41;   // W, along x
  TSlotParams t_slot{};
  FeedParams feed{};
  double col_gap_mm = 2.2;
  double row_gap_mm = 2.2;
  double rotation_deg = 90.0;
  double slot_top_inset_mm = 0.3;
  double rear_slot_scale = 1.0;
  int rows = 3;
  int cols = 3;
  SubstrateSpec substrate{};  // eps_r 2.2, tan 9e-5, h 0.766 mm
};

// Stage 1: plain rectangular radiator with feed and solid ground.
Scene scene_single_patch(const ReferenceDesign& d = {});
// Stage 2: double-T slotted radiator, rear T aperture in the ground.
Scene scene_double_t(const ReferenceDesign& d = {});
// Stage 3: the full 3x3 array.
Scene scene_paper_3x3(const ReferenceDesign& d = {});

bool is_scene_preset(const std::string& name);
Scene make_scene(const std::string& name, const ReferenceDesign& d = {});
std::vector<std::string> scene_preset_names();

// ----- solver fixtures ----------------------------------------------------

// Closed PEC air box, 20 x 10 x 25 mm, driven and probed on the TE101
// antinode line. No PML, no port; probe 0 carries the ringdown.
SolverSetup cavity_te101(double cell_mm = 0.5, long steps = 14000);

// Single soft current element at the center of a PML-terminated vacuum
// box, equivalence surface recorded at f_hz.
SolverSetup dipole_hertzian(double cell_mm = 0.75, double f_hz = 10e9);

// Thin PEC wire of total length lambda/2 (including the one-cell feed gap)
// driven by a 50 ohm port at its center.
SolverSetup dipole_halfwave(double f_hz = 10e9);

// 50 ohm port terminated by a 50 ohm lumped resistor on the same edges.
SolverSetup matched_load(double cell_mm = 0.25);

// 50 ohm port radiating into empty space (open circuit).
SolverSetup open_port(double cell_mm = 0.25);

bool is_fixture_preset(const std::string& name);
SolverSetup make_fixture(const std::string& name, double cell_mm);
std::vector<std::string> fixture_preset_names();

}  // namespace pf::presets
