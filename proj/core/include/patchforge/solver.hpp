// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "patchforge/huygens.hpp"
#include "patchforge/material_grid.hpp"
#include "patchforge/parallel.hpp"

namespace pf {

struct GridSpec {
  int nx = 1, ny = 1, nz = 1;
  double dx = 0.0, dy = 0.0, dz = 0.0;  // meters
  int pml_cells = 10;
  double courant_factor = 0.98;

  void validate() const;
};

// CFL-stable time step: dt = S / (c sqrt(1/dx^2 + 1/dy^2 + 1/dz^2)).
double compute_timestep(const GridSpec& grid);

// Gaussian-modulated sinusoid drive:
//   s(t) = A sin(2 pi f_c (t - t0)) exp(-(t - t0)^2 / (2 tau^2))
struct SourceSpec {
  double center_frequency_hz = 10e9;
  double tau_s = 5.692351950800456e-11;  // -20 dB edges at 4 and 16 GHz
  double delay_s = 4.5 * 5.692351950800456e-11;
  double amplitude = 1.0;

  static SourceSpec gaussian_band(double f_lo_hz, double f_hi_hz,
                                  double amplitude = 1.0);
  double value(double t_s) const;
  // Frequencies where the spectral envelope is 20 dB below its peak.
  std::pair<double, double> band_20db() const;
  void validate() const;
};

struct CpmlParams {
  int grading_order = 3;     // m
  double kappa_max = 5.0;
  double alpha_max = 0.24;   // linear grading, max at the interface
  double sigma_scale = 1.0;  // sigma_max = scale * (m+1) / (150 pi d)
};

// Span of collinear E edges used by lumped elements (axis: 0=x, 1=y, 2=z).
// Edges run from index a0 to a1-1 along the axis at transverse offsets.
struct EdgeSpan {
  int axis = 2;
  int i = 0, j = 0;  // transverse indices (interpretation depends on axis)
  int a0 = 0, a1 = 1;
  int count() const { return a1 - a0; }
};

struct LumpedPort {
  EdgeSpan span;
  double resistance_ohms = 50.0;
};

struct LumpedResistor {
  EdgeSpan span;
  double resistance_ohms = 50.0;
};

// Soft electric current source on a single E edge.
struct SoftCurrentSource {
  int axis = 2;
  int i = 0, j = 0, k = 0;
  double amps_per_unit = 1.0;  // waveform scale
};

struct FieldProbe {
  int axis = 2;
  int i = 0, j = 0, k = 0;
};

struct HuygensBoxSpec {
  int i0 = 0, j0 = 0, k0 = 0;  // node indices of the box corners
  int i1 = 0, j1 = 0, k1 = 0;
  std::vector<double> freq_hz;
};

struct StopSpec {
  long max_steps = 60000;
  bool auto_stop = true;
  double decay_db = 60.0;  // port/probe energy decay below peak
  int check_every = 100;
  long min_steps = 0;
};

struct SolverSetup {
  MaterialGrid materials;
  int pml_cells = 10;
  double courant_factor = 0.98;
  CpmlParams cpml;
  SourceSpec source;
  std::optional<LumpedPort> port;
  std::optional<SoftCurrentSource> soft_source;
  std::vector<LumpedResistor> resistors;
  std::vector<FieldProbe> probes;
  std::optional<HuygensBoxSpec> huygens;
  StopSpec stop;

  GridSpec grid_spec() const;
};

// Sampled lumped-port time series. v[n] is sampled at t = n dt, i[n] half a
// step later at t = (n + 1/2) dt.
struct PortRecord {
  double dt = 0.0;
  double z0 = 50.0;
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  std::vector<double> v;
  std::vector<double> i;

  bool empty() const { return v.empty(); }
};

struct RunOutput {
  PortRecord port;
  std::vector<std::vector<double>> probe_records;
  HuygensData huygens;
  double dt = 0.0;
  long steps = 0;
  bool energy_warning = false;  // did not decay before the step cap
};

struct Array3 {
  int nx = 0, ny = 0, nz = 0;
  std::vector<double> v;

  Array3() = default;
  Array3(int nx_, int ny_, int nz_)
      : nx(nx_), ny(ny_), nz(nz_),
        v(static_cast<size_t>(nx_) * ny_ * nz_, 0.0) {}
  size_t idx(int i, int j, int k) const {
    return static_cast<size_t>(i) +
           static_cast<size_t>(nx) *
               (static_cast<size_t>(j) + static_cast<size_t>(ny) * k);
  }
  double& at(int i, int j, int k) { return v[idx(i, j, k)]; }
  double at(int i, int j, int k) const { return v[idx(i, j, k)]; }
};

// Staggered Yee state. Ex(i,j,k) sits at (i+1/2, j, k) and so on; H
// components live on face centers half a step behind E in time.
struct FieldState {
  Array3 ex, ey, ez, hx, hy, hz;
  long step = 0;
};

using ProgressFn =
    std::function<void(long step, double t_s, double port_or_probe_level)>;

class Simulation {
 public:
  Simulation(SolverSetup setup, int threads = 1);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept = delete;

  void step();
  // Advances one step and returns the conserved discrete energy
  //   U = 1/2 sum eps |E^n|^2 dV + 1/2 sum mu Hx(n-1/2) Hx(n+1/2) dV + ...
  // evaluated mid-step. Costs a transient copy of the H arrays.
  double step_with_energy();

  long step_index() const;
  double dt() const;
  double time() const;
  const FieldState& fields() const;
  const SolverSetup& setup() const;

  double port_voltage() const;   // latest v sample
  double port_current() const;   // latest i sample
  double max_abs_e() const;

  // Runs to the stop criterion and packages the outputs.
  RunOutput run(const ProgressFn& progress = nullptr, int progress_every = 0);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-call convenience wrapper around Simulation::run.
RunOutput run_simulation(SolverSetup setup, int threads = 1,
                         const ProgressFn& progress = nullptr,
                         int progress_every = 0);

}  // namespace pf
