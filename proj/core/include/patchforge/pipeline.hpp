// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchforge/geometry.hpp"
#include "patchforge/solver.hpp"

namespace pf {

// Settings for turning a scene into a runnable solver setup.
struct SceneRunSettings {
  double cell_mm = 0.15;
  int pml_cells = 10;
  int air_gap_cells = 8;      // structure to recording box
  int huygens_gap_cells = 4;  // recording box to PML
  double f_min_hz = 4e9;
  double f_max_hz = 16e9;
  std::vector<double> pattern_freqs_hz;  // empty: derived from the window
  long max_steps = 60000;
  bool auto_stop = true;
  double decay_db = 60.0;
  double courant_factor = 0.98;
  CpmlParams cpml;
  double reference_frequency_hz = 10e9;
  size_t max_cells = 200'000'000;
  bool quiet = false;
};

// Frequencies recorded on the Huygens surface by default: a uniform comb
// over the window plus the reporting spot frequencies.
std::vector<double> default_pattern_freqs(double f_min_hz, double f_max_hz);

struct SceneSetup {
  SolverSetup solver;
  nlohmann::json resolved;  // grid, port, box, frequencies, source
};

SceneSetup build_scene_setup(const Scene& scene, const SceneRunSettings& s);

// ----- run directory ------------------------------------------------------
// <dir>/port.csv     step,time_s,v_volts,i_amps  (v at time_s = step*dt,
//                    i half a step earlier grid-wise: (step-1/2)*dt)
// <dir>/huygens.bin  PFHUY001 equivalence-surface spectra
// <dir>/probes.csv   step,time_s,probe columns (when probes exist)
// <dir>/run.json     resolved configuration + outcome

void write_run_dir(const std::string& dir, const RunOutput& out,
                   const nlohmann::json& resolved_config);

struct LoadedRun {
  PortRecord port;
  HuygensData huygens;
  std::vector<std::vector<double>> probe_records;
  nlohmann::json config;
  bool has_huygens = false;
};

LoadedRun read_run_dir(const std::string& dir);

}  // namespace pf
