// SPDX-License-Identifier: Apache-2.0
#include "patchforge/material_grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "patchforge/constants.hpp"

namespace pf {

bool BitArray::any() const {
  for (uint8_t b : bytes_)
    if (b) return true;
  return false;
}

MaterialGrid MaterialGrid::vacuum(int nx, int ny, int nz, double dx, double dy,
                                  double dz) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw GeometryError("grid needs at least one cell per axis");
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0))
    throw GeometryError("grid spacing must be positive");
  MaterialGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = dx;
  g.dy = dy;
  g.dz = dz;
  g.eps_r.assign(g.cell_count(), 1.0);
  g.sigma.assign(g.cell_count(), 0.0);
  g.pec_ex = BitArray(static_cast<size_t>(nx) * (ny + 1) * (nz + 1));
  g.pec_ey = BitArray(static_cast<size_t>(nx + 1) * ny * (nz + 1));
  g.pec_ez = BitArray(static_cast<size_t>(nx + 1) * (ny + 1) * nz);
  return g;
}

double MaterialGrid::pec_footprint_area_m2(int k_plane) const {
  double area = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const bool metal = pec_ex.get(ex_index(i, j, k_plane)) &&
                         pec_ex.get(ex_index(i, j + 1, k_plane)) &&
                         pec_ey.get(ey_index(i, j, k_plane)) &&
                         pec_ey.get(ey_index(i + 1, j, k_plane));
      if (metal) area += dx * dy;
    }
  return area;
}

bool MaterialGrid::operator==(const MaterialGrid& o) const {
  return nx == o.nx && ny == o.ny && nz == o.nz && dx == o.dx && dy == o.dy &&
         dz == o.dz && eps_r == o.eps_r && sigma == o.sigma &&
         pec_ex == o.pec_ex && pec_ey == o.pec_ey && pec_ez == o.pec_ez;
}

namespace {

constexpr char kGridMagic[8] = {'P', 'F', 'G', 'R', 'I', 'D', '0', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& v, size_t n) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void MaterialGrid::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError("cannot write grid file: " + path);
  out.write(kGridMagic, sizeof(kGridMagic));
  write_raw(out, static_cast<uint32_t>(nx));
  write_raw(out, static_cast<uint32_t>(ny));
  write_raw(out, static_cast<uint32_t>(nz));
  write_raw(out, dx);
  write_raw(out, dy);
  write_raw(out, dz);
  write_doubles(out, eps_r);
  write_doubles(out, sigma);
  for (const BitArray* mask : {&pec_ex, &pec_ey, &pec_ez})
    out.write(reinterpret_cast<const char*>(mask->bytes().data()),
              static_cast<std::streamsize>(mask->bytes().size()));
  if (!out) throw GeometryError("short write on grid file: " + path);
}

MaterialGrid MaterialGrid::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError("cannot read grid file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kGridMagic, sizeof(magic)) != 0)
    throw GeometryError("not a PFGRID01 file: " + path);
  uint32_t nx = 0, ny = 0, nz = 0;
  read_raw(in, nx);
  read_raw(in, ny);
  read_raw(in, nz);
  double dx = 0, dy = 0, dz = 0;
  read_raw(in, dx);
  read_raw(in, dy);
  read_raw(in, dz);
  MaterialGrid g = MaterialGrid::vacuum(static_cast<int>(nx),
                                        static_cast<int>(ny),
                                        static_cast<int>(nz), dx, dy, dz);
  read_doubles(in, g.eps_r, g.cell_count());
  read_doubles(in, g.sigma, g.cell_count());
  for (BitArray* mask : {&g.pec_ex, &g.pec_ey, &g.pec_ez})
    in.read(reinterpret_cast<char*>(mask->bytes().data()),
            static_cast<std::streamsize>(mask->bytes().size()));
  if (!in) throw GeometryError("truncated grid file: " + path);
  return g;
}

VoxelizeResult voxelize(const Scene& scene, const VoxelizeOptions& options) {
  if (!(options.cell_mm > 0.0))
    throw GeometryError("voxelize cell size must be positive");
  scene.validate();

  if (!options.quiet && scene.min_feature_mm < 1e29 &&
      options.cell_mm > scene.min_feature_mm / 2.0) {
    std::fprintf(stderr,
                 "[patchforge] warning: cell %.4g mm does not resolve the "
                 "smallest feature %.4g mm (want <= %.4g mm)\n",
                 options.cell_mm, scene.min_feature_mm,
                 scene.min_feature_mm / 2.0);
  }

  const Rect box = scene.bounding_box_mm();
  const double cell_m = options.cell_mm * mm_to_m;
  const double h_m = scene.substrate.height_mm * mm_to_m;
  const int n_sub = std::max(1, static_cast<int>(std::lround(
                                    scene.substrate.height_mm / options.cell_mm)));
  const double dz = h_m / n_sub;

  const int n_core_x =
      std::max(1, static_cast<int>(std::ceil(box.width() / options.cell_mm - 1e-9)));
  const int n_core_y =
      std::max(1, static_cast<int>(std::ceil(box.height() / options.cell_mm - 1e-9)));
  const int nx = n_core_x + 2 * options.pad_cells_xy;
  const int ny = n_core_y + 2 * options.pad_cells_xy;
  const int nz = n_sub + 2 * options.pad_cells_z;

  const size_t total = static_cast<size_t>(nx) * ny * nz;
  if (total > options.max_cells) {
    throw ResourceError("voxelization needs " + std::to_string(total) +
                        " cells, budget is " +
                        std::to_string(options.max_cells));
  }

  VoxelizeResult result;
  result.grid = MaterialGrid::vacuum(nx, ny, nz, cell_m, cell_m, dz);
  MaterialGrid& g = result.grid;
  result.k_ground = options.pad_cells_z;
  result.k_top = options.pad_cells_z + n_sub;

  // Center the scene laterally; put the ground plane exactly on a grid plane.
  const Vec2 c = box.center();
  g.origin_m = {c.x * mm_to_m - nx * cell_m / 2.0,
                c.y * mm_to_m - ny * cell_m / 2.0,
                -options.pad_cells_z * dz};

  auto x_of = [&](double frac_i) {
    return (g.origin_m[0] + frac_i * cell_m) * m_to_mm;
  };
  auto y_of = [&](double frac_j) {
    return (g.origin_m[1] + frac_j * cell_m) * m_to_mm;
  };

  // Substrate slab: one lateral material map replicated over its k-range.
  std::vector<double> er_map(static_cast<size_t>(nx) * ny, 1.0);
  std::vector<double> sg_map(static_cast<size_t>(nx) * ny, 0.0);
  const double omega_ref = 2.0 * pi * options.reference_frequency_hz;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto [er, tan_d] =
          scene.dielectric_at({x_of(i + 0.5), y_of(j + 0.5)});
      er_map[static_cast<size_t>(i) + static_cast<size_t>(nx) * j] = er;
      sg_map[static_cast<size_t>(i) + static_cast<size_t>(nx) * j] =
          omega_ref * eps0 * er * tan_d;
    }
  for (int k = result.k_ground; k < result.k_top; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const size_t m = static_cast<size_t>(i) + static_cast<size_t>(nx) * j;
        g.eps_r[g.cell_index(i, j, k)] = er_map[m];
        g.sigma[g.cell_index(i, j, k)] = sg_map[m];
      }

  // Metal sheets: tangential-edge PEC flags on the two metal planes.
  const struct {
    Layer layer;
    int k;
  } sheets[] = {{Layer::GroundMetal, result.k_ground},
                {Layer::TopMetal, result.k_top}};
  for (const auto& sheet : sheets) {
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (scene.metal_at(sheet.layer, {x_of(i + 0.5), y_of(j)}))
          g.pec_ex.set(g.ex_index(i, j, sheet.k));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (scene.metal_at(sheet.layer, {x_of(i), y_of(j + 0.5)}))
          g.pec_ey.set(g.ey_index(i, j, sheet.k));
  }

  if (scene.port) {
    GridPort port;
    port.resistance_ohms = scene.port->impedance_ohms;
    port.k0 = result.k_ground;
    port.k1 = result.k_top;
    int i = static_cast<int>(std::lround(
        (scene.port->position_mm.x * mm_to_m - g.origin_m[0]) / cell_m));
    int j = static_cast<int>(std::lround(
        (scene.port->position_mm.y * mm_to_m - g.origin_m[1]) / cell_m));
    // The column's top node must touch top-layer metal; nudge along the
    // feed direction until it does.
    auto touches_metal = [&](int ii, int jj) {
      if (ii < 1 || ii >= nx || jj < 1 || jj >= ny) return false;
      const int k = result.k_top;
      return g.pec_ex.get(g.ex_index(ii, jj, k)) ||
             g.pec_ex.get(g.ex_index(ii - 1, jj, k)) ||
             g.pec_ey.get(g.ey_index(ii, jj, k)) ||
             g.pec_ey.get(g.ey_index(ii, jj - 1, k));
    };
    const int step_i = scene.port->feed_direction.x > 0.5    ? 1
                       : scene.port->feed_direction.x < -0.5 ? -1
                                                             : 0;
    const int step_j = scene.port->feed_direction.y > 0.5    ? 1
                       : scene.port->feed_direction.y < -0.5 ? -1
                                                             : 0;
    int tries = 0;
    while (!touches_metal(i, j) && tries < 4) {
      i += step_i;
      j += step_j;
      ++tries;
    }
    if (!touches_metal(i, j))
      throw GeometryError("port column does not reach the feed conductor");
    port.i = i;
    port.j = j;
    result.port = port;
  }

  return result;
}

MaterialGrid voxelize_grid(const Scene& scene, double cell_mm) {
  VoxelizeOptions options;
  options.cell_mm = cell_mm;
  return voxelize(scene, options).grid;
}

void write_footprint_stl(const MaterialGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError("cannot write STL file: " + path);
  out << "solid conductor\n";
  char buf[256];
  auto tri = [&](double ax, double ay, double bx, double by, double cx,
                 double cy, double z) {
    std::snprintf(buf, sizeof(buf),
                  "facet normal 0 0 1\n  outer loop\n"
                  "    vertex %.9g %.9g %.9g\n    vertex %.9g %.9g %.9g\n"
                  "    vertex %.9g %.9g %.9g\n  endloop\nendfacet\n",
                  ax, ay, z, bx, by, z, cx, cy, z);
    out << buf;
  };
  for (int k = 0; k <= g.nz; ++k) {
    const double z = (g.origin_m[2] + k * g.dz) * m_to_mm;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const bool metal = g.pec_ex.get(g.ex_index(i, j, k)) &&
                           g.pec_ex.get(g.ex_index(i, j + 1, k)) &&
                           g.pec_ey.get(g.ey_index(i, j, k)) &&
                           g.pec_ey.get(g.ey_index(i + 1, j, k));
        if (!metal) continue;
        const double x0 = (g.origin_m[0] + i * g.dx) * m_to_mm;
        const double y0 = (g.origin_m[1] + j * g.dy) * m_to_mm;
        const double x1 = x0 + g.dx * m_to_mm;
        const double y1 = y0 + g.dy * m_to_mm;
        tri(x0, y0, x1, y0, x1, y1, z);
        tri(x0, y0, x1, y1, x0, y1, z);
      }
  }
  out << "endsolid conductor\n";
}

}  // namespace pf
