// SPDX-License-Identifier: Apache-2.0
#include "patchforge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include "patchforge/constants.hpp"

namespace pf {

void GridSpec::validate() const {
  if (nx < 1 || ny < 1 || nz < 1)
    throw SolverError("grid needs at least one cell per axis");
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0))
    throw SolverError("grid spacing must be positive");
  if (pml_cells < 0) throw SolverError("pml_cells must be >= 0");
  if (!(courant_factor > 0.0 && courant_factor < 1.0))
    throw SolverError("courant factor must lie in (0, 1)");
}

double compute_timestep(const GridSpec& grid) {
  grid.validate();
  const double inv =
      std::sqrt(1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy) +
                1.0 / (grid.dz * grid.dz));
  return grid.courant_factor / (c0 * inv);
}

SourceSpec SourceSpec::gaussian_band(double f_lo_hz, double f_hi_hz,
                                     double amplitude) {
  if (!(f_lo_hz > 0.0 && f_hi_hz > f_lo_hz))
    throw SolverError("source band requires 0 < f_lo < f_hi");
  SourceSpec s;
  s.center_frequency_hz = (f_lo_hz + f_hi_hz) / 2.0;
  const double half_band = (f_hi_hz - f_lo_hz) / 2.0;
  // Envelope exp(-t^2 / (2 tau^2)) has spectrum exp(-(2 pi df)^2 tau^2 / 2);
  // -20 dB amplitude at df = half_band fixes tau.
  s.tau_s = std::sqrt(2.0 * std::log(10.0)) / (2.0 * pi * half_band);
  s.delay_s = 4.5 * s.tau_s;
  s.amplitude = amplitude;
  return s;
}

double SourceSpec::value(double t_s) const {
  const double u = t_s - delay_s;
  return amplitude * std::sin(2.0 * pi * center_frequency_hz * u) *
         std::exp(-u * u / (2.0 * tau_s * tau_s));
}

std::pair<double, double> SourceSpec::band_20db() const {
  const double half_band =
      std::sqrt(2.0 * std::log(10.0)) / (2.0 * pi * tau_s);
  return {std::max(0.0, center_frequency_hz - half_band),
          center_frequency_hz + half_band};
}

void SourceSpec::validate() const {
  if (!(center_frequency_hz > 0.0)) throw SolverError("source f_c must be > 0");
  if (!(tau_s > 0.0)) throw SolverError("source tau must be > 0");
  if (delay_s < 4.0 * tau_s - 1e-15)
    throw SolverError("source delay must be >= 4 tau");
}

GridSpec SolverSetup::grid_spec() const {
  GridSpec g;
  g.nx = materials.nx;
  g.ny = materials.ny;
  g.nz = materials.nz;
  g.dx = materials.dx;
  g.dy = materials.dy;
  g.dz = materials.dz;
  g.pml_cells = pml_cells;
  g.courant_factor = courant_factor;
  return g;
}

namespace {

// Per-axis CPML profiles. E-side entries live on integer nodes (size n+1),
// H-side on half nodes (size n). inv_kappa is 1 outside the layer.
struct AxisPml {
  std::vector<double> ike, be, ce;
  std::vector<double> ikh, bh, ch;
};

AxisPml make_axis_pml(int n, double d, int npml, const CpmlParams& p,
                      double dt) {
  AxisPml a;
  a.ike.assign(n + 1, 1.0);
  a.be.assign(n + 1, 0.0);
  a.ce.assign(n + 1, 0.0);
  a.ikh.assign(n, 1.0);
  a.bh.assign(n, 0.0);
  a.ch.assign(n, 0.0);
  if (npml <= 0) return a;
  const double sigma_max =
      p.sigma_scale * (p.grading_order + 1) / (150.0 * pi * d);
  auto fill = [&](double x, double& ik, double& b, double& c) {
    const double sg = sigma_max * std::pow(x, p.grading_order);
    const double kp = 1.0 + (p.kappa_max - 1.0) * std::pow(x, p.grading_order);
    const double al = p.alpha_max * (1.0 - x);
    ik = 1.0 / kp;
    b = std::exp(-(sg / kp + al) * dt / eps0);
    const double denom = sg * kp + kp * kp * al;
    c = denom > 0.0 ? sg * (b - 1.0) / denom : 0.0;
  };
  auto depth = [&](double pos) {
    if (pos < npml) return (npml - pos) / npml;
    if (pos > n - npml) return (pos - (n - npml)) / double(npml);
    return 0.0;
  };
  for (int i = 0; i <= n; ++i) {
    const double x = depth(i);
    if (x > 0.0) fill(x, a.ike[i], a.be[i], a.ce[i]);
  }
  for (int i = 0; i < n; ++i) {
    const double x = depth(i + 0.5);
    if (x > 0.0) fill(x, a.ikh[i], a.bh[i], a.ch[i]);
  }
  return a;
}

// CPML memory slab: the component's array restricted to [lo, lo+extent)
// along the graded axis.
struct Psi {
  int axis = 0;  // graded axis
  int lo = 0;
  Array3 a;

  double& at(int i, int j, int k) {
    switch (axis) {
      case 0: return a.at(i - lo, j, k);
      case 1: return a.at(i, j - lo, k);
      default: return a.at(i, j, k - lo);
    }
  }
};

Psi make_psi(int axis, int lo, int cnt, int di, int dj, int dk) {
  Psi p;
  p.axis = axis;
  p.lo = lo;
  const int cx = axis == 0 ? cnt : di;
  const int cy = axis == 1 ? cnt : dj;
  const int cz = axis == 2 ? cnt : dk;
  p.a = Array3(std::max(cx, 0), std::max(cy, 0), std::max(cz, 0));
  return p;
}

}  // namespace

struct Simulation::Impl {
  SolverSetup setup;
  int nx, ny, nz;
  double dx, dy, dz;
  double inv_dx, inv_dy, inv_dz;
  double dt;
  double chf;  // dt / mu0
  FieldState f;
  Array3 ca_ex, cb_ex, ca_ey, cb_ey, ca_ez, cb_ez;
  AxisPml px, py, pz;
  int npml;

  // E-side CPML memories, [0] = low side, [1] = high side.
  Psi pe_xy[2], pe_xz[2], pe_yx[2], pe_yz[2], pe_zx[2], pe_zy[2];
  Psi ph_xy[2], ph_xz[2], ph_yx[2], ph_yz[2], ph_zx[2], ph_zy[2];

  ThreadPool pool;

  // Port runtime.
  bool has_port = false;
  EdgeSpan port_span;
  double port_r = 50.0;
  std::vector<size_t> port_edge_idx;
  std::vector<double> port_inject;  // cb_edge / (R_edge * A)
  double port_len = 0.0;            // edge length along the port axis
  PortRecord record;
  double last_v = 0.0;
  double last_i = 0.0;

  std::vector<std::vector<double>> probe_records;

  // Huygens recorder.
  struct HuyFace {
    HuygensFace out;
    std::vector<double> s_eu, s_ev, s_hu, s_hv;
  };
  bool has_huygens = false;
  std::vector<HuyFace> hfaces;
  std::vector<double> hfreqs;

  bool ran = false;

  explicit Impl(SolverSetup s, int threads)
      : setup(std::move(s)), pool(std::max(1, threads)) {
    const MaterialGrid& m = setup.materials;
    nx = m.nx;
    ny = m.ny;
    nz = m.nz;
    dx = m.dx;
    dy = m.dy;
    dz = m.dz;
    inv_dx = 1.0 / dx;
    inv_dy = 1.0 / dy;
    inv_dz = 1.0 / dz;
    const GridSpec grid = setup.grid_spec();
    dt = compute_timestep(grid);
    chf = dt / mu0;
    setup.source.validate();

    f.ex = Array3(nx, ny + 1, nz + 1);
    f.ey = Array3(nx + 1, ny, nz + 1);
    f.ez = Array3(nx + 1, ny + 1, nz);
    f.hx = Array3(nx + 1, ny, nz);
    f.hy = Array3(nx, ny + 1, nz);
    f.hz = Array3(nx, ny, nz + 1);

    build_coefficients();
    npml = setup.pml_cells;
    if (npml > 0) {
      if (npml * 2 >= std::min({nx, ny, nz}))
        throw SolverError("PML thicker than half the domain");
      px = make_axis_pml(nx, dx, npml, setup.cpml, dt);
      py = make_axis_pml(ny, dy, npml, setup.cpml, dt);
      pz = make_axis_pml(nz, dz, npml, setup.cpml, dt);
      alloc_psi();
    } else {
      px = make_axis_pml(nx, dx, 0, setup.cpml, dt);
      py = make_axis_pml(ny, dy, 0, setup.cpml, dt);
      pz = make_axis_pml(nz, dz, 0, setup.cpml, dt);
    }

    for (const LumpedResistor& r : setup.resistors)
      install_lumped(r.span, r.resistance_ohms, nullptr);
    if (setup.port) {
      has_port = true;
      port_span = setup.port->span;
      port_r = setup.port->resistance_ohms;
      if (!(port_r > 0.0)) throw SolverError("port resistance must be > 0");
      install_lumped(port_span, port_r, &port_edge_idx);
      record.dt = dt;
      record.z0 = port_r;
      const auto band = setup.source.band_20db();
      record.band_lo_hz = band.first;
      record.band_hi_hz = band.second;
    }
    if (setup.soft_source) validate_soft_source();
    probe_records.resize(setup.probes.size());
    for (const FieldProbe& p : setup.probes) validate_probe(p);
    if (setup.huygens) setup_huygens();
  }

  // ---- setup helpers ----------------------------------------------------

  double edge_eps_r(int comp, int i, int j, int k) const {
    const MaterialGrid& m = setup.materials;
    double sum = 0.0;
    int cnt = 0;
    auto add = [&](int ci, int cj, int ck) {
      if (ci < 0 || cj < 0 || ck < 0 || ci >= nx || cj >= ny || ck >= nz)
        return;
      sum += m.eps_r[m.cell_index(ci, cj, ck)];
      ++cnt;
    };
    if (comp == 0) {
      add(i, j - 1, k - 1), add(i, j, k - 1), add(i, j - 1, k), add(i, j, k);
    } else if (comp == 1) {
      add(i - 1, j, k - 1), add(i, j, k - 1), add(i - 1, j, k), add(i, j, k);
    } else {
      add(i - 1, j - 1, k), add(i, j - 1, k), add(i - 1, j, k), add(i, j, k);
    }
    return cnt ? sum / cnt : 1.0;
  }

  double edge_sigma(int comp, int i, int j, int k) const {
    const MaterialGrid& m = setup.materials;
    double sum = 0.0;
    int cnt = 0;
    auto add = [&](int ci, int cj, int ck) {
      if (ci < 0 || cj < 0 || ck < 0 || ci >= nx || cj >= ny || ck >= nz)
        return;
      sum += m.sigma[m.cell_index(ci, cj, ck)];
      ++cnt;
    };
    if (comp == 0) {
      add(i, j - 1, k - 1), add(i, j, k - 1), add(i, j - 1, k), add(i, j, k);
    } else if (comp == 1) {
      add(i - 1, j, k - 1), add(i, j, k - 1), add(i - 1, j, k), add(i, j, k);
    } else {
      add(i - 1, j - 1, k), add(i, j - 1, k), add(i - 1, j, k), add(i, j, k);
    }
    return cnt ? sum / cnt : 0.0;
  }

  void coeff_pair(double eps_r, double sig, double extra_g, double& ca,
                  double& cb) const {
    const double eps = eps0 * eps_r;
    const double s2 = (sig + extra_g) * dt / (2.0 * eps);
    ca = (1.0 - s2) / (1.0 + s2);
    cb = (dt / eps) / (1.0 + s2);
  }

  void build_coefficients() {
    const MaterialGrid& m = setup.materials;
    ca_ex = Array3(nx, ny + 1, nz + 1);
    cb_ex = Array3(nx, ny + 1, nz + 1);
    ca_ey = Array3(nx + 1, ny, nz + 1);
    cb_ey = Array3(nx + 1, ny, nz + 1);
    ca_ez = Array3(nx + 1, ny + 1, nz);
    cb_ez = Array3(nx + 1, ny + 1, nz);
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
          double ca, cb;
          coeff_pair(edge_eps_r(0, i, j, k), edge_sigma(0, i, j, k), 0.0, ca, cb);
          if (m.pec_ex.get(m.ex_index(i, j, k))) ca = cb = 0.0;
          ca_ex.at(i, j, k) = ca;
          cb_ex.at(i, j, k) = cb;
        }
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          double ca, cb;
          coeff_pair(edge_eps_r(1, i, j, k), edge_sigma(1, i, j, k), 0.0, ca, cb);
          if (m.pec_ey.get(m.ey_index(i, j, k))) ca = cb = 0.0;
          ca_ey.at(i, j, k) = ca;
          cb_ey.at(i, j, k) = cb;
        }
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          double ca, cb;
          coeff_pair(edge_eps_r(2, i, j, k), edge_sigma(2, i, j, k), 0.0, ca, cb);
          if (m.pec_ez.get(m.ez_index(i, j, k))) ca = cb = 0.0;
          ca_ez.at(i, j, k) = ca;
          cb_ez.at(i, j, k) = cb;
        }
  }

  // Lumped Thevenin branch over an edge span: conductance folded into the
  // update coefficients; when `inject_idx` is non-null the span is the port
  // and per-edge injection factors are recorded.
  void install_lumped(const EdgeSpan& span, double r_total,
                      std::vector<size_t>* inject_idx) {
    if (!(r_total > 0.0)) throw SolverError("lumped resistance must be > 0");
    const int n_edges = span.count();
    if (n_edges < 1) throw SolverError("lumped edge span is empty");
    const double r_edge = r_total / n_edges;
    const MaterialGrid& m = setup.materials;
    for (int a = span.a0; a < span.a1; ++a) {
      int i = 0, j = 0, k = 0;
      double area = 0.0, len = 0.0;
      Array3* ca = nullptr;
      Array3* cb = nullptr;
      int comp = span.axis;
      if (span.axis == 2) {
        i = span.i, j = span.j, k = a;
        area = dx * dy;
        len = dz;
        ca = &ca_ez;
        cb = &cb_ez;
        if (i < 1 || i >= nx || j < 1 || j >= ny || k < 0 || k >= nz)
          throw SolverError("lumped z-span outside the updatable grid");
        if (m.pec_ez.get(m.ez_index(i, j, k)))
          throw SolverError("lumped element placed on a PEC edge");
      } else if (span.axis == 1) {
        i = span.i, k = span.j, j = a;
        area = dx * dz;
        len = dy;
        ca = &ca_ey;
        cb = &cb_ey;
        if (i < 1 || i >= nx || k < 1 || k >= nz || j < 0 || j >= ny)
          throw SolverError("lumped y-span outside the updatable grid");
        if (m.pec_ey.get(m.ey_index(i, j, k)))
          throw SolverError("lumped element placed on a PEC edge");
      } else {
        j = span.i, k = span.j, i = a;
        area = dy * dz;
        len = dx;
        ca = &ca_ex;
        cb = &cb_ex;
        if (j < 1 || j >= ny || k < 1 || k >= nz || i < 0 || i >= nx)
          throw SolverError("lumped x-span outside the updatable grid");
        if (m.pec_ex.get(m.ex_index(i, j, k)))
          throw SolverError("lumped element placed on a PEC edge");
      }
      const double g = len / (r_edge * area);  // S/m equivalent
      double cav, cbv;
      coeff_pair(edge_eps_r(comp, i, j, k), edge_sigma(comp, i, j, k), g, cav,
                 cbv);
      const size_t idx = (span.axis == 2)   ? m.ez_index(i, j, k)
                         : (span.axis == 1) ? m.ey_index(i, j, k)
                                            : m.ex_index(i, j, k);
      ca->v[idx] = cav;
      cb->v[idx] = cbv;
      if (inject_idx) {
        inject_idx->push_back(idx);
        port_inject.push_back(cbv / (r_edge * area));
        port_len = len;
      }
    }
  }

  void validate_soft_source() const {
    const SoftCurrentSource& s = *setup.soft_source;
    const bool ok =
        (s.axis == 2 && s.i >= 1 && s.i < nx && s.j >= 1 && s.j < ny &&
         s.k >= 0 && s.k < nz) ||
        (s.axis == 1 && s.i >= 1 && s.i < nx && s.k >= 1 && s.k < nz &&
         s.j >= 0 && s.j < ny) ||
        (s.axis == 0 && s.j >= 1 && s.j < ny && s.k >= 1 && s.k < nz &&
         s.i >= 0 && s.i < nx);
    if (!ok) throw SolverError("soft source outside the updatable grid");
  }

  void validate_probe(const FieldProbe& p) const {
    const bool ok = p.i >= 0 && p.j >= 0 && p.k >= 0 &&
                    ((p.axis == 0 && p.i < nx && p.j <= ny && p.k <= nz) ||
                     (p.axis == 1 && p.i <= nx && p.j < ny && p.k <= nz) ||
                     (p.axis == 2 && p.i <= nx && p.j <= ny && p.k < nz));
    if (!ok) throw SolverError("probe outside the grid");
  }

  void alloc_psi() {
    const int ecnt = npml - 1;
    const int hcnt = npml;
    // E-side, graded x.
    pe_yx[0] = make_psi(0, 1, ecnt, nx + 1, ny, nz + 1);
    pe_yx[1] = make_psi(0, nx - npml + 1, ecnt, nx + 1, ny, nz + 1);
    pe_zx[0] = make_psi(0, 1, ecnt, nx + 1, ny + 1, nz);
    pe_zx[1] = make_psi(0, nx - npml + 1, ecnt, nx + 1, ny + 1, nz);
    // E-side, graded y.
    pe_xy[0] = make_psi(1, 1, ecnt, nx, ny + 1, nz + 1);
    pe_xy[1] = make_psi(1, ny - npml + 1, ecnt, nx, ny + 1, nz + 1);
    pe_zy[0] = make_psi(1, 1, ecnt, nx + 1, ny + 1, nz);
    pe_zy[1] = make_psi(1, ny - npml + 1, ecnt, nx + 1, ny + 1, nz);
    // E-side, graded z.
    pe_xz[0] = make_psi(2, 1, ecnt, nx, ny + 1, nz + 1);
    pe_xz[1] = make_psi(2, nz - npml + 1, ecnt, nx, ny + 1, nz + 1);
    pe_yz[0] = make_psi(2, 1, ecnt, nx + 1, ny, nz + 1);
    pe_yz[1] = make_psi(2, nz - npml + 1, ecnt, nx + 1, ny, nz + 1);
    // H-side.
    ph_yx[0] = make_psi(0, 0, hcnt, nx, ny + 1, nz);
    ph_yx[1] = make_psi(0, nx - npml, hcnt, nx, ny + 1, nz);
    ph_zx[0] = make_psi(0, 0, hcnt, nx, ny, nz + 1);
    ph_zx[1] = make_psi(0, nx - npml, hcnt, nx, ny, nz + 1);
    ph_xy[0] = make_psi(1, 0, hcnt, nx + 1, ny, nz);
    ph_xy[1] = make_psi(1, ny - npml, hcnt, nx + 1, ny, nz);
    ph_zy[0] = make_psi(1, 0, hcnt, nx, ny, nz + 1);
    ph_zy[1] = make_psi(1, ny - npml, hcnt, nx, ny, nz + 1);
    ph_xz[0] = make_psi(2, 0, hcnt, nx + 1, ny, nz);
    ph_xz[1] = make_psi(2, nz - npml, hcnt, nx + 1, ny, nz);
    ph_yz[0] = make_psi(2, 0, hcnt, nx, ny + 1, nz);
    ph_yz[1] = make_psi(2, nz - npml, hcnt, nx, ny + 1, nz);
  }

  void setup_huygens() {
    const HuygensBoxSpec& b = *setup.huygens;
    if (b.freq_hz.empty()) throw SolverError("huygens box has no frequencies");
    if (!(b.i0 >= 1 && b.i1 <= nx - 1 && b.j0 >= 1 && b.j1 <= ny - 1 &&
          b.k0 >= 1 && b.k1 <= nz - 1 && b.i0 < b.i1 && b.j0 < b.j1 &&
          b.k0 < b.k1))
      throw SolverError("huygens box must lie strictly inside the grid");
    has_huygens = true;
    hfreqs = b.freq_hz;
    const std::array<double, 3>& o = setup.materials.origin_m;
    auto add_face = [&](int axis, int sign, int nu, int nv,
                        std::array<double, 3> origin, std::array<double, 3> du,
                        std::array<double, 3> dv) {
      HuyFace face;
      face.out.normal_axis = axis;
      face.out.normal_sign = sign;
      face.out.nu = nu;
      face.out.nv = nv;
      face.out.origin_m = origin;
      face.out.du_m = du;
      face.out.dv_m = dv;
      const size_t n = static_cast<size_t>(nu) * nv;
      face.out.e_u.assign(n * hfreqs.size(), {0.0, 0.0});
      face.out.e_v.assign(n * hfreqs.size(), {0.0, 0.0});
      face.out.h_u.assign(n * hfreqs.size(), {0.0, 0.0});
      face.out.h_v.assign(n * hfreqs.size(), {0.0, 0.0});
      face.s_eu.assign(n, 0.0);
      face.s_ev.assign(n, 0.0);
      face.s_hu.assign(n, 0.0);
      face.s_hv.assign(n, 0.0);
      hfaces.push_back(std::move(face));
    };
    const int niu = b.i1 - b.i0, njv = b.j1 - b.j0, nkw = b.k1 - b.k0;
    // z faces: u -> x, v -> y.
    for (int side = 0; side < 2; ++side) {
      const int k = side ? b.k1 : b.k0;
      add_face(2, side ? 1 : -1, niu, njv,
               {o[0] + (b.i0 + 0.5) * dx, o[1] + (b.j0 + 0.5) * dy,
                o[2] + k * dz},
               {dx, 0.0, 0.0}, {0.0, dy, 0.0});
    }
    // x faces: u -> y, v -> z.
    for (int side = 0; side < 2; ++side) {
      const int i = side ? b.i1 : b.i0;
      add_face(0, side ? 1 : -1, njv, nkw,
               {o[0] + i * dx, o[1] + (b.j0 + 0.5) * dy,
                o[2] + (b.k0 + 0.5) * dz},
               {0.0, dy, 0.0}, {0.0, 0.0, dz});
    }
    // y faces: u -> x, v -> z.
    for (int side = 0; side < 2; ++side) {
      const int j = side ? b.j1 : b.j0;
      add_face(1, side ? 1 : -1, niu, nkw,
               {o[0] + (b.i0 + 0.5) * dx, o[1] + j * dy,
                o[2] + (b.k0 + 0.5) * dz},
               {dx, 0.0, 0.0}, {0.0, 0.0, dz});
    }
  }

  // ---- field passes -------------------------------------------------------

  void h_main_pass() {
    Array3& ex = f.ex;
    Array3& ey = f.ey;
    Array3& ez = f.ez;
    // Hx(i, j+1/2, k+1/2), dims (nx+1, ny, nz).
    pool.parallel_for(0, nz, [&](long kb, long ke) {
      for (long k = kb; k < ke; ++k) {
        const double ikz = pz.ikh[k] * inv_dz;
        for (int j = 0; j < ny; ++j) {
          const double iky = py.ikh[j] * inv_dy;
          double* hx = &f.hx.at(0, j, (int)k);
          const double* ez1 = &ez.at(0, j + 1, (int)k);
          const double* ez0 = &ez.at(0, j, (int)k);
          const double* ey1 = &ey.at(0, j, (int)k + 1);
          const double* ey0 = &ey.at(0, j, (int)k);
          for (int i = 0; i <= nx; ++i)
            hx[i] -= chf * ((ez1[i] - ez0[i]) * iky - (ey1[i] - ey0[i]) * ikz);
        }
      }
    });
    // Hy(i+1/2, j, k+1/2), dims (nx, ny+1, nz).
    pool.parallel_for(0, nz, [&](long kb, long ke) {
      for (long k = kb; k < ke; ++k) {
        const double ikz = pz.ikh[k] * inv_dz;
        for (int j = 0; j <= ny; ++j) {
          double* hy = &f.hy.at(0, j, (int)k);
          const double* ex1 = &ex.at(0, j, (int)k + 1);
          const double* ex0 = &ex.at(0, j, (int)k);
          const double* ez1 = &ez.at(1, j, (int)k);
          const double* ez0 = &ez.at(0, j, (int)k);
          for (int i = 0; i < nx; ++i)
            hy[i] -= chf * ((ex1[i] - ex0[i]) * ikz -
                            (ez1[i] - ez0[i]) * px.ikh[i] * inv_dx);
        }
      }
    });
    // Hz(i+1/2, j+1/2, k), dims (nx, ny, nz+1).
    pool.parallel_for(0, nz + 1, [&](long kb, long ke) {
      for (long k = kb; k < ke; ++k) {
        for (int j = 0; j < ny; ++j) {
          const double iky = py.ikh[j] * inv_dy;
          double* hz = &f.hz.at(0, j, (int)k);
          const double* ey1 = &ey.at(1, j, (int)k);
          const double* ey0 = &ey.at(0, j, (int)k);
          const double* ex1 = &ex.at(0, j + 1, (int)k);
          const double* ex0 = &ex.at(0, j, (int)k);
          for (int i = 0; i < nx; ++i)
            hz[i] -= chf * ((ey1[i] - ey0[i]) * px.ikh[i] * inv_dx -
                            (ex1[i] - ex0[i]) * iky);
        }
      }
    });
  }

  void h_psi_pass() {
    if (npml <= 0) return;
    // Graded x: Hy (d/dx Ez term, sign +psi), Hz (d/dx Ey term, sign -psi).
    for (Psi* p : {&ph_yx[0], &ph_yx[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nx;
      pool.parallel_for(0, nz, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = 0; j <= ny; ++j)
            for (int i = lo; i < hi; ++i) {
              const double d = (f.ez.at(i + 1, j, (int)k) -
                                f.ez.at(i, j, (int)k)) * inv_dx;
              double& ps = p->at(i, j, (int)k);
              ps = px.bh[i] * ps + px.ch[i] * d;
              f.hy.at(i, j, (int)k) += chf * ps;
            }
      });
    }
    for (Psi* p : {&ph_zx[0], &ph_zx[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nx;
      pool.parallel_for(0, nz + 1, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = 0; j < ny; ++j)
            for (int i = lo; i < hi; ++i) {
              const double d = (f.ey.at(i + 1, j, (int)k) -
                                f.ey.at(i, j, (int)k)) * inv_dx;
              double& ps = p->at(i, j, (int)k);
              ps = px.bh[i] * ps + px.ch[i] * d;
              f.hz.at(i, j, (int)k) -= chf * ps;
            }
      });
    }
    // Graded y: Hx (d/dy Ez, sign -psi), Hz (d/dy Ex, sign +psi).
    for (Psi* p : {&ph_xy[0], &ph_xy[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.ny;
      pool.parallel_for(0, nz, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = lo; j < hi; ++j)
            for (int i = 0; i <= nx; ++i) {
              const double d = (f.ez.at(i, j + 1, (int)k) -
                                f.ez.at(i, j, (int)k)) * inv_dy;
              double& ps = p->at(i, j, (int)k);
              ps = py.bh[j] * ps + py.ch[j] * d;
              f.hx.at(i, j, (int)k) -= chf * ps;
            }
      });
    }
    for (Psi* p : {&ph_zy[0], &ph_zy[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.ny;
      pool.parallel_for(0, nz + 1, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = lo; j < hi; ++j)
            for (int i = 0; i < nx; ++i) {
              const double d = (f.ex.at(i, j + 1, (int)k) -
                                f.ex.at(i, j, (int)k)) * inv_dy;
              double& ps = p->at(i, j, (int)k);
              ps = py.bh[j] * ps + py.ch[j] * d;
              f.hz.at(i, j, (int)k) += chf * ps;
            }
      });
    }
    // Graded z: Hx (d/dz Ey, sign +psi), Hy (d/dz Ex, sign -psi).
    for (Psi* p : {&ph_xz[0], &ph_xz[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nz;
      pool.parallel_for(0, ny, [&](long jb, long je) {
        for (long j = jb; j < je; ++j)
          for (int k = lo; k < hi; ++k)
            for (int i = 0; i <= nx; ++i) {
              const double d = (f.ey.at(i, (int)j, k + 1) -
                                f.ey.at(i, (int)j, k)) * inv_dz;
              double& ps = p->at(i, (int)j, k);
              ps = pz.bh[k] * ps + pz.ch[k] * d;
              f.hx.at(i, (int)j, k) += chf * ps;
            }
      });
    }
    for (Psi* p : {&ph_yz[0], &ph_yz[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nz;
      pool.parallel_for(0, ny + 1, [&](long jb, long je) {
        for (long j = jb; j < je; ++j)
          for (int k = lo; k < hi; ++k)
            for (int i = 0; i < nx; ++i) {
              const double d = (f.ex.at(i, (int)j, k + 1) -
                                f.ex.at(i, (int)j, k)) * inv_dz;
              double& ps = p->at(i, (int)j, k);
              ps = pz.bh[k] * ps + pz.ch[k] * d;
              f.hy.at(i, (int)j, k) -= chf * ps;
            }
      });
    }
  }

  void e_main_pass() {
    // Ex(i+1/2, j, k): interior j in [1, ny-1], k in [1, nz-1].
    pool.parallel_for(1, nz, [&](long kb, long ke) {
      for (long k = kb; k < ke; ++k) {
        const double ikz = pz.ike[k] * inv_dz;
        for (int j = 1; j < ny; ++j) {
          const double iky = py.ike[j] * inv_dy;
          double* ex = &f.ex.at(0, j, (int)k);
          const double* ca = &ca_ex.at(0, j, (int)k);
          const double* cb = &cb_ex.at(0, j, (int)k);
          const double* hz1 = &f.hz.at(0, j, (int)k);
          const double* hz0 = &f.hz.at(0, j - 1, (int)k);
          const double* hy1 = &f.hy.at(0, j, (int)k);
          const double* hy0 = &f.hy.at(0, j, (int)k - 1);
          for (int i = 0; i < nx; ++i)
            ex[i] = ca[i] * ex[i] +
                    cb[i] * ((hz1[i] - hz0[i]) * iky - (hy1[i] - hy0[i]) * ikz);
        }
      }
    });
    // Ey(i, j+1/2, k): interior i in [1, nx-1], k in [1, nz-1].
    pool.parallel_for(1, nz, [&](long kb, long ke) {
      for (long k = kb; k < ke; ++k) {
        const double ikz = pz.ike[k] * inv_dz;
        for (int j = 0; j < ny; ++j) {
          double* ey = &f.ey.at(0, j, (int)k);
          const double* ca = &ca_ey.at(0, j, (int)k);
          const double* cb = &cb_ey.at(0, j, (int)k);
          const double* hx1 = &f.hx.at(0, j, (int)k);
          const double* hx0 = &f.hx.at(0, j, (int)k - 1);
          const double* hz1 = &f.hz.at(0, j, (int)k);
          for (int i = 1; i < nx; ++i)
            ey[i] = ca[i] * ey[i] +
                    cb[i] * ((hx1[i] - hx0[i]) * ikz -
                             (hz1[i] - hz1[i - 1]) * px.ike[i] * inv_dx);
        }
      }
    });
    // Ez(i, j, k+1/2): interior i in [1, nx-1], j in [1, ny-1].
    pool.parallel_for(0, nz, [&](long kb, long ke) {
      for (long k = kb; k < ke; ++k) {
        for (int j = 1; j < ny; ++j) {
          const double iky = py.ike[j] * inv_dy;
          double* ez = &f.ez.at(0, j, (int)k);
          const double* ca = &ca_ez.at(0, j, (int)k);
          const double* cb = &cb_ez.at(0, j, (int)k);
          const double* hy1 = &f.hy.at(0, j, (int)k);
          const double* hx1 = &f.hx.at(0, j, (int)k);
          const double* hx0 = &f.hx.at(0, j - 1, (int)k);
          for (int i = 1; i < nx; ++i)
            ez[i] = ca[i] * ez[i] +
                    cb[i] * ((hy1[i] - hy1[i - 1]) * px.ike[i] * inv_dx -
                             (hx1[i] - hx0[i]) * iky);
        }
      }
    });
  }

  void e_psi_pass() {
    if (npml <= 0) return;
    // Graded x: Ey (d/dx Hz, sign -), Ez (d/dx Hy, sign +).
    for (Psi* p : {&pe_yx[0], &pe_yx[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nx;
      pool.parallel_for(1, nz, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = 0; j < ny; ++j)
            for (int i = lo; i < hi; ++i) {
              const double d = (f.hz.at(i, j, (int)k) -
                                f.hz.at(i - 1, j, (int)k)) * inv_dx;
              double& ps = p->at(i, j, (int)k);
              ps = px.be[i] * ps + px.ce[i] * d;
              f.ey.at(i, j, (int)k) -= cb_ey.at(i, j, (int)k) * ps;
            }
      });
    }
    for (Psi* p : {&pe_zx[0], &pe_zx[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nx;
      pool.parallel_for(0, nz, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = 1; j < ny; ++j)
            for (int i = lo; i < hi; ++i) {
              const double d = (f.hy.at(i, j, (int)k) -
                                f.hy.at(i - 1, j, (int)k)) * inv_dx;
              double& ps = p->at(i, j, (int)k);
              ps = px.be[i] * ps + px.ce[i] * d;
              f.ez.at(i, j, (int)k) += cb_ez.at(i, j, (int)k) * ps;
            }
      });
    }
    // Graded y: Ex (d/dy Hz, sign +), Ez (d/dy Hx, sign -).
    for (Psi* p : {&pe_xy[0], &pe_xy[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.ny;
      pool.parallel_for(1, nz, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = lo; j < hi; ++j)
            for (int i = 0; i < nx; ++i) {
              const double d = (f.hz.at(i, j, (int)k) -
                                f.hz.at(i, j - 1, (int)k)) * inv_dy;
              double& ps = p->at(i, j, (int)k);
              ps = py.be[j] * ps + py.ce[j] * d;
              f.ex.at(i, j, (int)k) += cb_ex.at(i, j, (int)k) * ps;
            }
      });
    }
    for (Psi* p : {&pe_zy[0], &pe_zy[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.ny;
      pool.parallel_for(0, nz, [&](long kb, long ke) {
        for (long k = kb; k < ke; ++k)
          for (int j = lo; j < hi; ++j)
            for (int i = 1; i < nx; ++i) {
              const double d = (f.hx.at(i, j, (int)k) -
                                f.hx.at(i, j - 1, (int)k)) * inv_dy;
              double& ps = p->at(i, j, (int)k);
              ps = py.be[j] * ps + py.ce[j] * d;
              f.ez.at(i, j, (int)k) -= cb_ez.at(i, j, (int)k) * ps;
            }
      });
    }
    // Graded z: Ex (d/dz Hy, sign -), Ey (d/dz Hx, sign +).
    for (Psi* p : {&pe_xz[0], &pe_xz[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nz;
      pool.parallel_for(1, ny, [&](long jb, long je) {
        for (long j = jb; j < je; ++j)
          for (int k = lo; k < hi; ++k)
            for (int i = 0; i < nx; ++i) {
              const double d = (f.hy.at(i, (int)j, k) -
                                f.hy.at(i, (int)j, k - 1)) * inv_dz;
              double& ps = p->at(i, (int)j, k);
              ps = pz.be[k] * ps + pz.ce[k] * d;
              f.ex.at(i, (int)j, k) -= cb_ex.at(i, (int)j, k) * ps;
            }
      });
    }
    for (Psi* p : {&pe_yz[0], &pe_yz[1]}) {
      const int lo = p->lo, hi = p->lo + p->a.nz;
      pool.parallel_for(0, ny, [&](long jb, long je) {
        for (long j = jb; j < je; ++j)
          for (int k = lo; k < hi; ++k)
            for (int i = 1; i < nx; ++i) {
              const double d = (f.hx.at(i, (int)j, k) -
                                f.hx.at(i, (int)j, k - 1)) * inv_dz;
              double& ps = p->at(i, (int)j, k);
              ps = pz.be[k] * ps + pz.ce[k] * d;
              f.ey.at(i, (int)j, k) += cb_ey.at(i, (int)j, k) * ps;
            }
      });
    }
  }

  // ---- lumped elements, probes, recording ---------------------------------

  double measure_port_voltage() const {
    if (!has_port) return 0.0;
    double sum = 0.0;
    const EdgeSpan& s = port_span;
    for (int a = s.a0; a < s.a1; ++a) {
      if (s.axis == 2)
        sum += f.ez.at(s.i, s.j, a);
      else if (s.axis == 1)
        sum += f.ey.at(s.i, a, s.j);
      else
        sum += f.ex.at(a, s.i, s.j);
    }
    return -sum * port_len;
  }

  void inject_sources(double t_mid) {
    if (has_port) {
      const double vs_e =
          setup.source.value(t_mid) / static_cast<double>(port_span.count());
      Array3& arr = port_span.axis == 2   ? f.ez
                    : port_span.axis == 1 ? f.ey
                                          : f.ex;
      for (size_t e = 0; e < port_edge_idx.size(); ++e)
        arr.v[port_edge_idx[e]] -= port_inject[e] * vs_e;
    }
    if (setup.soft_source) {
      const SoftCurrentSource& s = *setup.soft_source;
      const double current =
          setup.source.value(t_mid) * s.amps_per_unit;
      if (s.axis == 2) {
        f.ez.at(s.i, s.j, s.k) -=
            cb_ez.at(s.i, s.j, s.k) * current / (dx * dy);
      } else if (s.axis == 1) {
        f.ey.at(s.i, s.j, s.k) -=
            cb_ey.at(s.i, s.j, s.k) * current / (dx * dz);
      } else {
        f.ex.at(s.i, s.j, s.k) -=
            cb_ex.at(s.i, s.j, s.k) * current / (dy * dz);
      }
    }
  }

  void record_probes() {
    for (size_t p = 0; p < setup.probes.size(); ++p) {
      const FieldProbe& pr = setup.probes[p];
      double val = 0.0;
      if (pr.axis == 0)
        val = f.ex.at(pr.i, pr.j, pr.k);
      else if (pr.axis == 1)
        val = f.ey.at(pr.i, pr.j, pr.k);
      else
        val = f.ez.at(pr.i, pr.j, pr.k);
      probe_records[p].push_back(val);
    }
  }

  // ---- Huygens accumulation -----------------------------------------------

  void fill_scratch_e(HuyFace& face) {
    const HuygensBoxSpec& b = *setup.huygens;
    const int axis = face.out.normal_axis;
    const int plane = face.out.normal_sign > 0
                          ? (axis == 0 ? b.i1 : axis == 1 ? b.j1 : b.k1)
                          : (axis == 0 ? b.i0 : axis == 1 ? b.j0 : b.k0);
    size_t p = 0;
    if (axis == 2) {
      for (int j = b.j0; j < b.j1; ++j)
        for (int i = b.i0; i < b.i1; ++i, ++p) {
          face.s_eu[p] = 0.5 * (f.ex.at(i, j, plane) + f.ex.at(i, j + 1, plane));
          face.s_ev[p] = 0.5 * (f.ey.at(i, j, plane) + f.ey.at(i + 1, j, plane));
        }
    } else if (axis == 0) {
      for (int k = b.k0; k < b.k1; ++k)
        for (int j = b.j0; j < b.j1; ++j, ++p) {
          face.s_eu[p] = 0.5 * (f.ey.at(plane, j, k) + f.ey.at(plane, j, k + 1));
          face.s_ev[p] = 0.5 * (f.ez.at(plane, j, k) + f.ez.at(plane, j + 1, k));
        }
    } else {
      for (int k = b.k0; k < b.k1; ++k)
        for (int i = b.i0; i < b.i1; ++i, ++p) {
          face.s_eu[p] = 0.5 * (f.ex.at(i, plane, k) + f.ex.at(i, plane, k + 1));
          face.s_ev[p] = 0.5 * (f.ez.at(i, plane, k) + f.ez.at(i + 1, plane, k));
        }
    }
  }

  void fill_scratch_h(HuyFace& face) {
    const HuygensBoxSpec& b = *setup.huygens;
    const int axis = face.out.normal_axis;
    const int plane = face.out.normal_sign > 0
                          ? (axis == 0 ? b.i1 : axis == 1 ? b.j1 : b.k1)
                          : (axis == 0 ? b.i0 : axis == 1 ? b.j0 : b.k0);
    size_t p = 0;
    if (axis == 2) {
      for (int j = b.j0; j < b.j1; ++j)
        for (int i = b.i0; i < b.i1; ++i, ++p) {
          face.s_hu[p] = 0.25 * (f.hx.at(i, j, plane - 1) +
                                 f.hx.at(i + 1, j, plane - 1) +
                                 f.hx.at(i, j, plane) + f.hx.at(i + 1, j, plane));
          face.s_hv[p] = 0.25 * (f.hy.at(i, j, plane - 1) +
                                 f.hy.at(i, j + 1, plane - 1) +
                                 f.hy.at(i, j, plane) + f.hy.at(i, j + 1, plane));
        }
    } else if (axis == 0) {
      for (int k = b.k0; k < b.k1; ++k)
        for (int j = b.j0; j < b.j1; ++j, ++p) {
          face.s_hu[p] = 0.25 * (f.hy.at(plane - 1, j, k) + f.hy.at(plane, j, k) +
                                 f.hy.at(plane - 1, j + 1, k) +
                                 f.hy.at(plane, j + 1, k));
          face.s_hv[p] = 0.25 * (f.hz.at(plane - 1, j, k) + f.hz.at(plane, j, k) +
                                 f.hz.at(plane - 1, j, k + 1) +
                                 f.hz.at(plane, j, k + 1));
        }
    } else {
      for (int k = b.k0; k < b.k1; ++k)
        for (int i = b.i0; i < b.i1; ++i, ++p) {
          face.s_hu[p] = 0.25 * (f.hx.at(i, plane - 1, k) +
                                 f.hx.at(i + 1, plane - 1, k) +
                                 f.hx.at(i, plane, k) + f.hx.at(i + 1, plane, k));
          face.s_hv[p] = 0.25 * (f.hz.at(i, plane - 1, k) + f.hz.at(i, plane, k) +
                                 f.hz.at(i, plane - 1, k + 1) +
                                 f.hz.at(i, plane, k + 1));
        }
    }
  }

  void huygens_accumulate_h(double t) {
    if (!has_huygens) return;
    for (HuyFace& face : hfaces) {
      fill_scratch_h(face);
      const size_t npts = face.out.points();
      for (size_t q = 0; q < hfreqs.size(); ++q) {
        const double w = 2.0 * pi * hfreqs[q];
        const std::complex<double> ph(std::cos(-w * t), std::sin(-w * t));
        std::complex<double>* hu = face.out.h_u.data() + q * npts;
        std::complex<double>* hv = face.out.h_v.data() + q * npts;
        for (size_t p = 0; p < npts; ++p) {
          hu[p] += face.s_hu[p] * ph;
          hv[p] += face.s_hv[p] * ph;
        }
      }
    }
  }

  void huygens_accumulate_e(double t) {
    if (!has_huygens) return;
    for (HuyFace& face : hfaces) {
      fill_scratch_e(face);
      const size_t npts = face.out.points();
      for (size_t q = 0; q < hfreqs.size(); ++q) {
        const double w = 2.0 * pi * hfreqs[q];
        const std::complex<double> ph(std::cos(-w * t), std::sin(-w * t));
        std::complex<double>* eu = face.out.e_u.data() + q * npts;
        std::complex<double>* ev = face.out.e_v.data() + q * npts;
        for (size_t p = 0; p < npts; ++p) {
          eu[p] += face.s_eu[p] * ph;
          ev[p] += face.s_ev[p] * ph;
        }
      }
    }
  }

  // ---- stepping -----------------------------------------------------------

  void do_step(double* energy_out) {
    const long n = f.step;
    const double t_mid = (n + 0.5) * dt;

    std::vector<double> hx_old, hy_old, hz_old;
    if (energy_out) {
      hx_old = f.hx.v;
      hy_old = f.hy.v;
      hz_old = f.hz.v;
    }

    h_main_pass();
    h_psi_pass();

    if (energy_out) *energy_out = discrete_energy(hx_old, hy_old, hz_old);

    const double v_old = last_v;
    huygens_accumulate_h(t_mid);

    e_main_pass();
    e_psi_pass();
    inject_sources(t_mid);

    if (has_port) {
      const double v_new = measure_port_voltage();
      // Thevenin branch current through the port at t_mid; the update's
      // semi-implicit average makes this exact for the discrete system.
      const double i_mid =
          (setup.source.value(t_mid) - 0.5 * (v_old + v_new)) / port_r;
      record.v.push_back(v_new);
      record.i.push_back(i_mid);
      last_v = v_new;
      last_i = i_mid;
      if (!std::isfinite(v_new))
        throw DivergenceError(
            "non-finite port voltage at step " + std::to_string(n), n);
    }
    huygens_accumulate_e((n + 1.0) * dt);
    record_probes();
    f.step = n + 1;
  }

  double discrete_energy(const std::vector<double>& hx_old,
                         const std::vector<double>& hy_old,
                         const std::vector<double>& hz_old) const {
    const double dv = dx * dy * dz;
    double ue = 0.0;
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double e = f.ex.at(i, j, k);
          if (e != 0.0) ue += eps0 * edge_eps_r(0, i, j, k) * e * e;
        }
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          const double e = f.ey.at(i, j, k);
          if (e != 0.0) ue += eps0 * edge_eps_r(1, i, j, k) * e * e;
        }
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          const double e = f.ez.at(i, j, k);
          if (e != 0.0) ue += eps0 * edge_eps_r(2, i, j, k) * e * e;
        }
    double uh = 0.0;
    for (size_t m = 0; m < f.hx.v.size(); ++m) uh += hx_old[m] * f.hx.v[m];
    for (size_t m = 0; m < f.hy.v.size(); ++m) uh += hy_old[m] * f.hy.v[m];
    for (size_t m = 0; m < f.hz.v.size(); ++m) uh += hz_old[m] * f.hz.v[m];
    return 0.5 * dv * (ue + mu0 * uh);
  }

  double max_abs_e() const {
    double m = 0.0;
    for (const Array3* a : {&f.ex, &f.ey, &f.ez})
      for (double v : a->v) m = std::max(m, std::abs(v));
    return m;
  }
};

Simulation::Simulation(SolverSetup setup, int threads)
    : impl_(std::make_unique<Impl>(std::move(setup), threads)) {}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;

void Simulation::step() { impl_->do_step(nullptr); }

double Simulation::step_with_energy() {
  double u = 0.0;
  impl_->do_step(&u);
  return u;
}

long Simulation::step_index() const { return impl_->f.step; }
double Simulation::dt() const { return impl_->dt; }
double Simulation::time() const { return impl_->f.step * impl_->dt; }
const FieldState& Simulation::fields() const { return impl_->f; }
const SolverSetup& Simulation::setup() const { return impl_->setup; }
double Simulation::port_voltage() const { return impl_->last_v; }
double Simulation::port_current() const { return impl_->last_i; }
double Simulation::max_abs_e() const { return impl_->max_abs_e(); }

RunOutput Simulation::run(const ProgressFn& progress, int progress_every) {
  Impl& im = *impl_;
  if (im.ran) throw SolverError("Simulation::run may only be called once");
  im.ran = true;
  const StopSpec& stop = im.setup.stop;
  RunOutput out;
  out.dt = im.dt;

  const double decay_amp = std::pow(10.0, -stop.decay_db / 20.0);
  const double source_end = im.setup.source.delay_s + 5.0 * im.setup.source.tau_s;
  double peak = 0.0;
  double window_max = 0.0;
  bool decayed = false;

  for (long n = 0; n < stop.max_steps; ++n) {
    im.do_step(nullptr);
    double level = 0.0;
    if (im.has_port)
      level = std::abs(im.last_v);
    else if (!im.probe_records.empty() && !im.probe_records[0].empty())
      level = std::abs(im.probe_records[0].back());
    peak = std::max(peak, level);
    window_max = std::max(window_max, level);

    if (progress && progress_every > 0 && (n + 1) % progress_every == 0)
      progress(n + 1, im.f.step * im.dt, level);

    if ((n + 1) % stop.check_every == 0) {
      const double m = im.max_abs_e();
      if (!std::isfinite(m))
        throw DivergenceError("non-finite field at step " + std::to_string(n + 1),
                              n + 1);
      const double t = im.f.step * im.dt;
      if (stop.auto_stop && n + 1 >= stop.min_steps && t > source_end) {
        if (peak > 0.0 && window_max < peak * decay_amp) {
          decayed = true;
          break;
        }
        if (peak == 0.0) {
          decayed = true;
          break;
        }
      }
      window_max = 0.0;
    }
  }
  out.steps = im.f.step;
  out.energy_warning = stop.auto_stop && !decayed && out.steps >= stop.max_steps;

  out.port = std::move(im.record);
  out.probe_records = std::move(im.probe_records);
  if (im.has_huygens) {
    out.huygens.freq_hz = im.hfreqs;
    for (Impl::HuyFace& face : im.hfaces) {
      // DFT normalization: sum -> integral.
      for (auto* arr : {&face.out.e_u, &face.out.e_v, &face.out.h_u,
                        &face.out.h_v})
        for (std::complex<double>& c : *arr) c *= im.dt;
      out.huygens.faces.push_back(std::move(face.out));
    }
  }
  return out;
}

RunOutput run_simulation(SolverSetup setup, int threads,
                         const ProgressFn& progress, int progress_every) {
  Simulation sim(std::move(setup), threads);
  return sim.run(progress, progress_every);
}

}  // namespace pf
