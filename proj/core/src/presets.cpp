// SPDX-License-Identifier: Apache-2.0
#include "patchforge/presets.hpp"

#include <cmath>

#include "patchforge/constants.hpp"

namespace pf::presets {

namespace {

ElementFragment reference_element(const ReferenceDesign& d, bool with_slots) {
  ElementFragment el = build_patch_element(d.patch_length_mm, d.patch_width_mm);
  if (with_slots) apply_double_t_slots(el, d.t_slot, d.slot_top_inset_mm);
  return el;
}

void expand_substrate_margin(Scene& scene, const ReferenceDesign& d) {
  // Single-element scenes keep the closed-form 3h margin around the patch.
  const double m = 3.0 * d.substrate.height_mm;
  if (!scene.array_bbox_mm) return;
  const Rect& a = *scene.array_bbox_mm;
  scene.expand_substrate_to_fit({a.x0 - m, a.y0 - m, a.x1 + m, a.y1 + m});
}

}  // namespace

Scene scene_single_patch(const ReferenceDesign& d) {
  Scene scene = single_element_scene(reference_element(d, false), d.substrate);
  add_feed(scene, d.feed);
  expand_substrate_margin(scene, d);
  add_ground_plane(scene);
  scene.validate();
  return scene;
}

Scene scene_double_t(const ReferenceDesign& d) {
  Scene scene = single_element_scene(reference_element(d, true), d.substrate);
  add_feed(scene, d.feed);
  expand_substrate_margin(scene, d);
  add_ground_with_rear_slot(scene, d.t_slot, d.rear_slot_scale);
  scene.validate();
  return scene;
}

Scene scene_paper_3x3(const ReferenceDesign& d) {
  ArrayParams a;
  a.rows = d.rows;
  a.cols = d.cols;
  a.col_gap_mm = d.col_gap_mm;
  a.row_gap_mm = d.row_gap_mm;
  a.element_rotation_deg = d.rotation_deg;
  Scene scene = tile_array(reference_element(d, true), a, d.substrate);
  add_feed(scene, d.feed);
  add_ground_with_rear_slot(scene, d.t_slot, d.rear_slot_scale);
  scene.validate();
  return scene;
}

bool is_scene_preset(const std::string& name) {
  return name == "single-patch" || name == "double-t" || name == "paper-3x3";
}

Scene make_scene(const std::string& name, const ReferenceDesign& d) {
  if (name == "single-patch") return scene_single_patch(d);
  if (name == "double-t") return scene_double_t(d);
  if (name == "paper-3x3") return scene_paper_3x3(d);
  throw GeometryError("unknown scene preset: " + name);
}

std::vector<std::string> scene_preset_names() {
  return {"single-patch", "double-t", "paper-3x3"};
}

// ----- solver fixtures ------------------------------------------------------

SolverSetup cavity_te101(double cell_mm, long steps) {
  if (!(cell_mm > 0.0)) throw SolverError("cell size must be positive");
  const double d = cell_mm * mm_to_m;
  const int nx = static_cast<int>(std::lround(20.0 / cell_mm));
  const int ny = static_cast<int>(std::lround(10.0 / cell_mm));
  const int nz = static_cast<int>(std::lround(25.0 / cell_mm));
  SolverSetup s;
  s.materials = MaterialGrid::vacuum(nx, ny, nz, d, d, d);
  s.pml_cells = 0;  // grid boundary is the PEC wall
  s.source = SourceSpec::gaussian_band(8.1e9, 11.1e9);
  SoftCurrentSource src;
  src.axis = 1;  // Ey couples TE101, not TE102/TE201/TM modes
  src.i = nx / 2;
  src.j = ny / 2;
  src.k = nz / 2;
  s.soft_source = src;
  FieldProbe probe;
  probe.axis = 1;
  probe.i = nx / 2;
  probe.j = ny / 4;
  probe.k = nz / 2;
  s.probes.push_back(probe);
  s.stop.auto_stop = false;  // lossless box rings forever
  s.stop.max_steps = steps;
  return s;
}

SolverSetup dipole_hertzian(double cell_mm, double f_hz) {
  if (!(cell_mm > 0.0 && f_hz > 0.0))
    throw SolverError("hertzian dipole needs positive cell and frequency");
  const double d = cell_mm * mm_to_m;
  const int n = 64;
  SolverSetup s;
  s.materials = MaterialGrid::vacuum(n, n, n, d, d, d);
  s.pml_cells = 10;
  s.source = SourceSpec::gaussian_band(0.5 * f_hz, 1.5 * f_hz);
  SoftCurrentSource src;
  src.axis = 2;
  src.i = n / 2;
  src.j = n / 2;
  src.k = n / 2;
  s.soft_source = src;
  HuygensBoxSpec box;
  box.i0 = box.j0 = box.k0 = 16;
  box.i1 = box.j1 = box.k1 = n - 16;
  box.freq_hz = {f_hz};
  s.huygens = box;
  FieldProbe probe;  // drives the auto-stop
  probe.axis = 2;
  probe.i = n / 2 + 8;
  probe.j = n / 2;
  probe.k = n / 2;
  s.probes.push_back(probe);
  s.stop.max_steps = 6000;
  s.stop.auto_stop = true;
  return s;
}

SolverSetup dipole_halfwave(double f_hz) {
  if (!(f_hz > 0.0)) throw SolverError("dipole frequency must be positive");
  const double lambda = c0 / f_hz;
  const int wire_edges = 21;  // arms of 10 around the one-cell feed gap
  const double d = (lambda / 2.0) / wire_edges;
  const int n = 65;
  SolverSetup s;
  s.materials = MaterialGrid::vacuum(n, n, n, d, d, d);
  s.pml_cells = 10;
  s.source = SourceSpec::gaussian_band(0.5 * f_hz, 1.5 * f_hz);
  const int ic = n / 2, jc = n / 2;
  const int k0 = n / 2 - wire_edges / 2;
  const int kgap = k0 + wire_edges / 2;
  MaterialGrid& m = s.materials;
  for (int k = k0; k < k0 + wire_edges; ++k)
    if (k != kgap) m.pec_ez.set(m.ez_index(ic, jc, k));
  LumpedPort port;
  port.span = EdgeSpan{2, ic, jc, kgap, kgap + 1};
  port.resistance_ohms = 50.0;
  s.port = port;
  HuygensBoxSpec box;
  box.i0 = box.j0 = box.k0 = 16;
  box.i1 = box.j1 = box.k1 = n - 16;
  box.freq_hz = {f_hz};
  s.huygens = box;
  s.stop.max_steps = 20000;
  s.stop.auto_stop = true;
  return s;
}

namespace {

SolverSetup port_fixture(double cell_mm, bool with_load) {
  if (!(cell_mm > 0.0)) throw SolverError("cell size must be positive");
  const double d = cell_mm * mm_to_m;
  const int n = 40;
  SolverSetup s;
  s.materials = MaterialGrid::vacuum(n, n, n, d, d, d);
  s.pml_cells = 10;
  s.source = SourceSpec::gaussian_band(4e9, 16e9);
  const int span = 4;
  EdgeSpan edges{2, n / 2, n / 2, n / 2 - span / 2, n / 2 + span / 2};
  LumpedPort port;
  port.span = edges;
  port.resistance_ohms = 50.0;
  s.port = port;
  if (with_load) s.resistors.push_back(LumpedResistor{edges, 50.0});
  s.stop.max_steps = 20000;
  s.stop.auto_stop = true;
  return s;
}

}  // namespace

SolverSetup matched_load(double cell_mm) { return port_fixture(cell_mm, true); }
SolverSetup open_port(double cell_mm) { return port_fixture(cell_mm, false); }

bool is_fixture_preset(const std::string& name) {
  return name == "cavity-te101" || name == "dipole-hertzian" ||
         name == "dipole-halfwave" || name == "matched-load" ||
         name == "open-port";
}

SolverSetup make_fixture(const std::string& name, double cell_mm) {
  if (name == "cavity-te101") return cavity_te101(cell_mm);
  if (name == "dipole-hertzian") return dipole_hertzian(cell_mm);
  if (name == "dipole-halfwave") return dipole_halfwave();
  if (name == "matched-load") return matched_load(cell_mm);
  if (name == "open-port") return open_port(cell_mm);
  throw SolverError("unknown fixture preset: " + name);
}

std::vector<std::string> fixture_preset_names() {
  return {"cavity-te101", "dipole-hertzian", "dipole-halfwave", "matched-load",
          "open-port"};
}

}  // namespace pf::presets
