// SPDX-License-Identifier: Apache-2.0
#include "patchforge/huygens.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace pf {

namespace {

constexpr char kHuyMagic[8] = {'P', 'F', 'H', 'U', 'Y', '0', '0', '1'};

double norm3(const std::array<double, 3>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

std::array<double, 3> scaled(const std::array<double, 3>& v, double s) {
  return {v[0] * s, v[1] * s, v[2] * s};
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_cvec(std::ofstream& out, const std::vector<std::complex<double>>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(std::complex<double>)));
}

void read_cvec(std::ifstream& in, std::vector<std::complex<double>>& v,
               size_t n) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
}

}  // namespace

double HuygensFace::cell_area_m2() const {
  return norm3(du_m) * norm3(dv_m);
}

std::array<double, 3> HuygensFace::unit_u() const {
  return scaled(du_m, 1.0 / norm3(du_m));
}

std::array<double, 3> HuygensFace::unit_v() const {
  return scaled(dv_m, 1.0 / norm3(dv_m));
}

std::array<double, 3> HuygensFace::point_m(int u, int v) const {
  return {origin_m[0] + u * du_m[0] + v * dv_m[0],
          origin_m[1] + u * du_m[1] + v * dv_m[1],
          origin_m[2] + u * du_m[2] + v * dv_m[2]};
}

int HuygensData::frequency_index(double f_hz) const {
  for (size_t q = 0; q < freq_hz.size(); ++q) {
    const double f = freq_hz[q];
    if (std::abs(f - f_hz) <= 1e-6 * std::max(1.0, std::abs(f))) {
      return static_cast<int>(q);
    }
  }
  return -1;
}

void HuygensData::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write huygens file: " + path);
  out.write(kHuyMagic, sizeof(kHuyMagic));
  write_raw(out, static_cast<uint32_t>(freq_hz.size()));
  write_raw(out, static_cast<uint32_t>(faces.size()));
  for (double f : freq_hz) write_raw(out, f);
  for (const HuygensFace& face : faces) {
    write_raw(out, static_cast<int32_t>(face.normal_axis));
    write_raw(out, static_cast<int32_t>(face.normal_sign));
    write_raw(out, static_cast<uint32_t>(face.nu));
    write_raw(out, static_cast<uint32_t>(face.nv));
    for (double x : face.origin_m) write_raw(out, x);
    for (double x : face.du_m) write_raw(out, x);
    for (double x : face.dv_m) write_raw(out, x);
    write_cvec(out, face.e_u);
    write_cvec(out, face.e_v);
    write_cvec(out, face.h_u);
    write_cvec(out, face.h_v);
  }
  if (!out) throw Error("short write on huygens file: " + path);
}

HuygensData HuygensData::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read huygens file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kHuyMagic, sizeof(magic)) != 0)
    throw Error("not a PFHUY001 file: " + path);
  uint32_t nfreq = 0, nfaces = 0;
  read_raw(in, nfreq);
  read_raw(in, nfaces);
  HuygensData data;
  data.freq_hz.resize(nfreq);
  for (double& f : data.freq_hz) read_raw(in, f);
  data.faces.resize(nfaces);
  for (HuygensFace& face : data.faces) {
    int32_t axis = 0, sign = 0;
    uint32_t nu = 0, nv = 0;
    read_raw(in, axis);
    read_raw(in, sign);
    read_raw(in, nu);
    read_raw(in, nv);
    face.normal_axis = axis;
    face.normal_sign = sign;
    face.nu = static_cast<int>(nu);
    face.nv = static_cast<int>(nv);
    for (double& x : face.origin_m) read_raw(in, x);
    for (double& x : face.du_m) read_raw(in, x);
    for (double& x : face.dv_m) read_raw(in, x);
    const size_t n = static_cast<size_t>(nfreq) * face.points();
    read_cvec(in, face.e_u, n);
    read_cvec(in, face.e_v, n);
    read_cvec(in, face.h_u, n);
    read_cvec(in, face.h_v, n);
  }
  if (!in) throw Error("truncated huygens file: " + path);
  return data;
}

}  // namespace pf
