// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "patchforge/errors.hpp"

namespace pf {

// One rectangular face of the recording box. Points lie at
//   r(u, v) = origin_m + u * du_m + v * dv_m,   u in [0, nu), v in [0, nv)
// each owning an area |du| * |dv|. The outward normal is normal_axis /
// normal_sign; (u, v, n) ordering is chosen so u x v = n.
struct HuygensFace {
  int normal_axis = 2;  // 0=x, 1=y, 2=z
  int normal_sign = 1;
  int nu = 0, nv = 0;
  std::array<double, 3> origin_m = {0.0, 0.0, 0.0};
  std::array<double, 3> du_m = {0.0, 0.0, 0.0};
  std::array<double, 3> dv_m = {0.0, 0.0, 0.0};
  // Tangential field spectra per frequency, u-fastest:
  // index = q * (nu * nv) + v * nu + u
  std::vector<std::complex<double>> e_u, e_v, h_u, h_v;

  size_t points() const { return static_cast<size_t>(nu) * nv; }
  double cell_area_m2() const;
  std::array<double, 3> unit_u() const;
  std::array<double, 3> unit_v() const;
  std::array<double, 3> point_m(int u, int v) const;
};

// Frequency-domain equivalence-surface record of a run.
struct HuygensData {
  std::vector<double> freq_hz;
  std::vector<HuygensFace> faces;

  bool empty() const { return faces.empty() || freq_hz.empty(); }
  int frequency_index(double f_hz) const;  // -1 when absent

  // Binary round trip, magic "PFHUY001", little-endian.
  void save(const std::string& path) const;
  static HuygensData load(const std::string& path);
};

}  // namespace pf
