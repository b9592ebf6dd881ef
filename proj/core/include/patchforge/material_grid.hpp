// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patchforge/errors.hpp"
#include "patchforge/geometry.hpp"

namespace pf {

class BitArray {
 public:
  BitArray() = default;
  explicit BitArray(size_t n) : n_(n), bytes_((n + 7) / 8, 0) {}
  size_t size() const { return n_; }
  bool get(size_t i) const { return (bytes_[i >> 3] >> (i & 7)) & 1u; }
  void set(size_t i) { bytes_[i >> 3] |= static_cast<uint8_t>(1u << (i & 7)); }
  void clear(size_t i) {
    bytes_[i >> 3] &= static_cast<uint8_t>(~(1u << (i & 7)));
  }
  bool any() const;
  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t>& bytes() { return bytes_; }
  bool operator==(const BitArray&) const = default;

 private:
  size_t n_ = 0;
  std::vector<uint8_t> bytes_;
};

// Yee-grid material description: per-cell permittivity and conductivity
// plus PEC flags on the three edge families. Cell (i, j, k) spans
// [i dx, (i+1) dx] x ... relative to origin_m. Arrays are x-fastest.
//
// Edge conventions (per-component array extents):
//   Ex edge (i, j, k) at (i+1/2, j, k);  extents nx     x (ny+1) x (nz+1)
//   Ey edge (i, j, k) at (i, j+1/2, k);  extents (nx+1) x  ny    x (nz+1)
//   Ez edge (i, j, k) at (i, j, k+1/2);  extents (nx+1) x (ny+1) x  nz
struct MaterialGrid {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;  // meters
  std::vector<double> eps_r;             // nx*ny*nz
  std::vector<double> sigma;             // S/m, nx*ny*nz
  BitArray pec_ex, pec_ey, pec_ez;
  // In-memory placement of the grid in scene coordinates; not serialized.
  std::array<double, 3> origin_m = {0.0, 0.0, 0.0};

  static MaterialGrid vacuum(int nx, int ny, int nz, double dx, double dy,
                             double dz);

  size_t cell_count() const {
    return static_cast<size_t>(nx) * ny * nz;
  }
  size_t cell_index(int i, int j, int k) const {
    return static_cast<size_t>(i) +
           static_cast<size_t>(nx) * (static_cast<size_t>(j) +
                                      static_cast<size_t>(ny) * k);
  }
  size_t ex_index(int i, int j, int k) const {
    return static_cast<size_t>(i) +
           static_cast<size_t>(nx) * (static_cast<size_t>(j) +
                                      static_cast<size_t>(ny + 1) * k);
  }
  size_t ey_index(int i, int j, int k) const {
    return static_cast<size_t>(i) +
           static_cast<size_t>(nx + 1) * (static_cast<size_t>(j) +
                                          static_cast<size_t>(ny) * k);
  }
  size_t ez_index(int i, int j, int k) const {
    return static_cast<size_t>(i) +
           static_cast<size_t>(nx + 1) * (static_cast<size_t>(j) +
                                          static_cast<size_t>(ny + 1) * k);
  }

  // Conductor footprint area on grid plane k: a face counts as metal when
  // all four of its edges carry the PEC flag.
  double pec_footprint_area_m2(int k_plane) const;

  // Binary round trip, magic "PFGRID01", little-endian.
  void save(const std::string& path) const;
  static MaterialGrid load(const std::string& path);

  bool operator==(const MaterialGrid&) const;
};

struct GridPort {
  int i = 0, j = 0;       // Ez column
  int k0 = 0, k1 = 0;     // edges k0 .. k1-1
  double resistance_ohms = 50.0;
};

struct VoxelizeOptions {
  double cell_mm = 0.2;
  int pad_cells_xy = 10;       // air cells added on each lateral side
  int pad_cells_z = 10;        // air cells above the top plane / below ground
  double reference_frequency_hz = 10e9;  // tan(delta) -> conductivity
  size_t max_cells = 100'000'000;
  bool quiet = false;
};

struct VoxelizeResult {
  MaterialGrid grid;
  std::optional<GridPort> port;
  int k_ground = 0;  // grid plane of the ground metal layer
  int k_top = 0;     // grid plane of the top metal layer
};

// Staircase rasterization of a scene: cell-center membership for the
// dielectric, edge-midpoint membership for the zero-thickness PEC sheets.
// dz is adjusted so the substrate is an exact number of cells.
VoxelizeResult voxelize(const Scene& scene, const VoxelizeOptions& options);

// Convenience form with default padding.
MaterialGrid voxelize_grid(const Scene& scene, double cell_mm);

// ASCII STL of the rasterized conductor footprints (inspection only).
void write_footprint_stl(const MaterialGrid& grid, const std::string& path);

}  // namespace pf
