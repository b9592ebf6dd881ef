// SPDX-License-Identifier: Apache-2.0
#include "patchforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "patchforge/constants.hpp"
#include "patchforge/fft.hpp"

namespace pf {

namespace {

constexpr double kIncidentFloor = 1e-6;  // relative to the band peak

double db20(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

std::vector<double> apply_window(const std::vector<double>& x, Window w) {
  if (w == Window::Rectangular || x.size() < 8) return x;
  std::vector<double> out = x;
  const size_t n = x.size();
  const size_t n0 = static_cast<size_t>(0.9 * static_cast<double>(n));
  for (size_t i = n0; i < n; ++i) {
    const double u =
        static_cast<double>(i - n0) / static_cast<double>(n - 1 - n0);
    out[i] *= 0.5 * (1.0 + std::cos(pi * u));
  }
  return out;
}

Window resolve_window(const PortRecord& record, Window requested) {
  if (requested != Window::Auto) return requested;
  double peak = 0.0;
  for (double v : record.v) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return Window::Rectangular;
  const size_t n = record.v.size();
  const size_t tail = std::max<size_t>(1, n / 20);
  double tail_max = 0.0;
  for (size_t i = n - tail; i < n; ++i)
    tail_max = std::max(tail_max, std::abs(record.v[i]));
  return tail_max <= 1e-3 * peak ? Window::Rectangular : Window::TailCosine;
}

}  // namespace

SParamResult s11_from_port(const PortRecord& record, Window window,
                           int pad_factor) {
  if (pad_factor < 1) throw AnalysisError("pad_factor must be >= 1");
  SParamResult out;
  out.z0 = record.z0;
  if (record.v.empty()) return out;
  if (!(record.dt > 0.0)) throw AnalysisError("port record has no timestep");
  if (record.v.size() != record.i.size())
    throw AnalysisError("port record v/i length mismatch");

  const Window w = resolve_window(record, window);
  const std::vector<double> vw = apply_window(record.v, w);
  const std::vector<double> iw = apply_window(record.i, w);

  const size_t nfft = next_pow2(vw.size()) * static_cast<size_t>(pad_factor);
  std::vector<std::complex<double>> fv(nfft, 0.0), fi(nfft, 0.0);
  for (size_t n = 0; n < vw.size(); ++n) {
    fv[n] = vw[n];
    fi[n] = iw[n];
  }
  fft_inplace(fv);
  fft_inplace(fi);

  const double df = 1.0 / (static_cast<double>(nfft) * record.dt);
  const double f_lo = record.band_lo_hz;
  const double f_hi = record.band_hi_hz > 0.0
                          ? record.band_hi_hz
                          : 0.5 / record.dt;  // Nyquist fallback
  const double root_z0 = std::sqrt(record.z0);

  std::vector<double> amag;
  for (size_t k = 1; k < nfft / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < f_lo || f > f_hi) continue;
    const double wng = 2.0 * pi * f;
    // v[n] is sampled at (n+1) dt, i[n] at (n+1/2) dt.
    const std::complex<double> shift_v(std::cos(-wng * record.dt),
                                       std::sin(-wng * record.dt));
    const std::complex<double> shift_i(std::cos(-wng * record.dt * 0.5),
                                       std::sin(-wng * record.dt * 0.5));
    const std::complex<double> vf = fv[k] * shift_v * record.dt;
    const std::complex<double> cf = fi[k] * shift_i * record.dt;
    const std::complex<double> a = (vf + record.z0 * cf) / (2.0 * root_z0);
    const std::complex<double> b = (vf - record.z0 * cf) / (2.0 * root_z0);
    out.freq_hz.push_back(f);
    out.s11.push_back(std::abs(a) > 0.0 ? b / a : std::complex<double>(0.0));
    amag.push_back(std::abs(a));
  }
  const double a_peak = amag.empty() ? 0.0 : *std::max_element(amag.begin(),
                                                               amag.end());
  out.masked.assign(out.size(), 0);
  for (size_t k = 0; k < out.size(); ++k)
    if (amag[k] < kIncidentFloor * a_peak) {
      out.masked[k] = 1;
      out.s11[k] = 0.0;
    }
  return out;
}

PortSpectrum port_spectrum_at(const PortRecord& record, double f_hz) {
  if (record.v.empty()) throw AnalysisError("empty port record");
  PortSpectrum s;
  s.v = dft_at(record.v, record.dt, record.dt, f_hz);
  s.i = dft_at(record.i, record.dt, 0.5 * record.dt, f_hz);
  return s;
}

double port_accepted_power(const PortRecord& record, double f_hz) {
  const PortSpectrum s = port_spectrum_at(record, f_hz);
  return 0.5 * std::real(s.v * std::conj(s.i));
}

std::vector<Band> find_bands(const SParamResult& s, double threshold_db) {
  std::vector<Band> bands;
  // Work on the unmasked samples only.
  std::vector<double> f, d;
  for (size_t k = 0; k < s.size(); ++k) {
    if (s.masked.size() == s.size() && s.masked[k]) continue;
    f.push_back(s.freq_hz[k]);
    d.push_back(db20(std::abs(s.s11[k])));
  }
  const size_t n = f.size();
  auto cross = [&](size_t lo, size_t hi) {
    // Linear interpolation of the threshold crossing between samples.
    const double t = (threshold_db - d[lo]) / (d[hi] - d[lo]);
    return f[lo] + t * (f[hi] - f[lo]);
  };
  bool inside = false;
  Band cur;
  cur.threshold_db = threshold_db;
  for (size_t k = 0; k < n; ++k) {
    const bool below = d[k] <= threshold_db;
    if (below && !inside) {
      cur.f_low_hz = (k > 0) ? cross(k - 1, k) : f[k];
      inside = true;
    } else if (!below && inside) {
      cur.f_high_hz = cross(k - 1, k);
      bands.push_back(cur);
      inside = false;
    }
  }
  if (inside) {
    cur.f_high_hz = f[n - 1];
    bands.push_back(cur);
  }
  return bands;
}

// ----- NTFF ---------------------------------------------------------------

namespace {

struct Vec3c {
  std::complex<double> x{0.0, 0.0}, y{0.0, 0.0}, z{0.0, 0.0};
};

struct Vec3d {
  double x = 0.0, y = 0.0, z = 0.0;
};

Vec3d cross_dd(const Vec3d& a, const Vec3d& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Vec3c cross_dc(const Vec3d& a, const Vec3c& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

std::complex<double> dot_cd(const Vec3c& a, const Vec3d& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

}  // namespace

double FarFieldPattern::peak_directivity_dbi() const {
  return *std::max_element(directivity_dbi.begin(), directivity_dbi.end());
}

double FarFieldPattern::peak_gain_dbi() const {
  return *std::max_element(gain_dbi.begin(), gain_dbi.end());
}

FarFieldPattern ntff_transform(const HuygensData& huygens, double f_hz,
                               const AngularGrid& grid, double p_in_watts) {
  if (huygens.empty()) throw AnalysisError("no recorded equivalence surface");
  const int qi = huygens.frequency_index(f_hz);
  if (qi < 0)
    throw AnalysisError("frequency " + std::to_string(f_hz) +
                        " Hz was not recorded on the Huygens surface");
  const size_t q = static_cast<size_t>(qi);
  const double k0 = 2.0 * pi * f_hz / c0;

  FarFieldPattern pat;
  pat.frequency_hz = f_hz;
  pat.theta_deg.resize(grid.n_theta);
  for (int t = 0; t < grid.n_theta; ++t)
    pat.theta_deg[t] = 180.0 * t / (grid.n_theta - 1);
  pat.phi_deg.resize(grid.n_phi);
  for (int p = 0; p < grid.n_phi; ++p)
    pat.phi_deg[p] = 360.0 * p / (grid.n_phi - 1);

  // Radiated power from the Poynting flux through the box (independent of
  // the angular grid).
  double p_rad = 0.0;
  for (const HuygensFace& face : huygens.faces) {
    const auto uu = face.unit_u();
    const auto vv = face.unit_v();
    const Vec3d u{uu[0], uu[1], uu[2]};
    const Vec3d v{vv[0], vv[1], vv[2]};
    Vec3d n{0.0, 0.0, 0.0};
    (face.normal_axis == 0 ? n.x : face.normal_axis == 1 ? n.y : n.z) =
        face.normal_sign;
    const double dA = face.cell_area_m2();
    const size_t npts = face.points();
    const std::complex<double>* eu = face.e_u.data() + q * npts;
    const std::complex<double>* ev = face.e_v.data() + q * npts;
    const std::complex<double>* hu = face.h_u.data() + q * npts;
    const std::complex<double>* hv = face.h_v.data() + q * npts;
    double flux = 0.0;
    for (size_t p = 0; p < npts; ++p) {
      const Vec3c e{eu[p] * u.x + ev[p] * v.x, eu[p] * u.y + ev[p] * v.y,
                    eu[p] * u.z + ev[p] * v.z};
      const Vec3c h{hu[p] * u.x + hv[p] * v.x, hu[p] * u.y + hv[p] * v.y,
                    hu[p] * u.z + hv[p] * v.z};
      const Vec3c hc{std::conj(h.x), std::conj(h.y), std::conj(h.z)};
      const Vec3c s{e.y * hc.z - e.z * hc.y, e.z * hc.x - e.x * hc.z,
                    e.x * hc.y - e.y * hc.x};
      flux += 0.5 * std::real(dot_cd(s, n));
    }
    p_rad += flux * dA;
  }
  pat.p_rad = p_rad;

  // Radiation vectors N and L per direction.
  const size_t ndir = static_cast<size_t>(grid.n_theta) * grid.n_phi;
  pat.e_theta.assign(ndir, {0.0, 0.0});
  pat.e_phi.assign(ndir, {0.0, 0.0});

  std::vector<double> sin_t(grid.n_theta), cos_t(grid.n_theta);
  for (int t = 0; t < grid.n_theta; ++t) {
    const double rad = pat.theta_deg[t] * pi / 180.0;
    sin_t[t] = std::sin(rad);
    cos_t[t] = std::cos(rad);
  }
  std::vector<double> sin_p(grid.n_phi), cos_p(grid.n_phi);
  for (int p = 0; p < grid.n_phi; ++p) {
    const double rad = pat.phi_deg[p] * pi / 180.0;
    sin_p[p] = std::sin(rad);
    cos_p[p] = std::cos(rad);
  }

  std::vector<Vec3c> n_vec(ndir), l_vec(ndir);
  for (const HuygensFace& face : huygens.faces) {
    const auto uu = face.unit_u();
    const auto vv = face.unit_v();
    const Vec3d u{uu[0], uu[1], uu[2]};
    const Vec3d v{vv[0], vv[1], vv[2]};
    Vec3d n{0.0, 0.0, 0.0};
    (face.normal_axis == 0 ? n.x : face.normal_axis == 1 ? n.y : n.z) =
        face.normal_sign;
    const double dA = face.cell_area_m2();
    const size_t npts = face.points();
    const std::complex<double>* eu = face.e_u.data() + q * npts;
    const std::complex<double>* ev = face.e_v.data() + q * npts;
    const std::complex<double>* hu = face.h_u.data() + q * npts;
    const std::complex<double>* hv = face.h_v.data() + q * npts;

    // Equivalence currents per point.
    std::vector<Vec3c> js(npts), ms(npts);
    std::vector<Vec3d> pos(npts);
    for (int iv = 0; iv < face.nv; ++iv)
      for (int iu = 0; iu < face.nu; ++iu) {
        const size_t p = static_cast<size_t>(iv) * face.nu + iu;
        const Vec3c e{eu[p] * u.x + ev[p] * v.x, eu[p] * u.y + ev[p] * v.y,
                      eu[p] * u.z + ev[p] * v.z};
        const Vec3c h{hu[p] * u.x + hv[p] * v.x, hu[p] * u.y + hv[p] * v.y,
                      hu[p] * u.z + hv[p] * v.z};
        js[p] = cross_dc(n, h);  // n x H
        Vec3c me = cross_dc(n, e);
        ms[p] = {-me.x, -me.y, -me.z};  // -n x E
        const auto r = face.point_m(iu, iv);
        pos[p] = {r[0], r[1], r[2]};
      }

    for (int t = 0; t < grid.n_theta; ++t)
      for (int p = 0; p < grid.n_phi; ++p) {
        const Vec3d rhat{sin_t[t] * cos_p[p], sin_t[t] * sin_p[p], cos_t[t]};
        const size_t dir = static_cast<size_t>(t) * grid.n_phi + p;
        Vec3c nsum, lsum;
        for (size_t pt = 0; pt < npts; ++pt) {
          const double phase =
              k0 * (rhat.x * pos[pt].x + rhat.y * pos[pt].y + rhat.z * pos[pt].z);
          const std::complex<double> ej(std::cos(phase), std::sin(phase));
          nsum.x += js[pt].x * ej;
          nsum.y += js[pt].y * ej;
          nsum.z += js[pt].z * ej;
          lsum.x += ms[pt].x * ej;
          lsum.y += ms[pt].y * ej;
          lsum.z += ms[pt].z * ej;
        }
        n_vec[dir].x += nsum.x * dA;
        n_vec[dir].y += nsum.y * dA;
        n_vec[dir].z += nsum.z * dA;
        l_vec[dir].x += lsum.x * dA;
        l_vec[dir].y += lsum.y * dA;
        l_vec[dir].z += lsum.z * dA;
      }
  }

  // Far fields at 1 m with exp(-jkr) removed:
  //   E_theta = -j k / (4 pi) (L_phi + eta0 N_theta)
  //   E_phi   = +j k / (4 pi) (L_theta - eta0 N_phi)
  const std::complex<double> jk(0.0, k0 / (4.0 * pi));
  for (int t = 0; t < grid.n_theta; ++t)
    for (int p = 0; p < grid.n_phi; ++p) {
      const size_t dir = static_cast<size_t>(t) * grid.n_phi + p;
      const Vec3d that{cos_t[t] * cos_p[p], cos_t[t] * sin_p[p], -sin_t[t]};
      const Vec3d phat{-sin_p[p], cos_p[p], 0.0};
      const std::complex<double> n_th = dot_cd(n_vec[dir], that);
      const std::complex<double> n_ph = dot_cd(n_vec[dir], phat);
      const std::complex<double> l_th = dot_cd(l_vec[dir], that);
      const std::complex<double> l_ph = dot_cd(l_vec[dir], phat);
      pat.e_theta[dir] = -jk * (l_ph + eta0 * n_th);
      pat.e_phi[dir] = jk * (l_th - eta0 * n_ph);
    }

  pat.p_in = p_in_watts > 0.0 ? p_in_watts : p_rad;
  pat.efficiency = radiation_efficiency(p_rad, pat.p_in);
  pat.directivity_dbi.assign(ndir, 0.0);
  pat.gain_dbi.assign(ndir, 0.0);
  for (size_t dir = 0; dir < ndir; ++dir) {
    const double u_int = (std::norm(pat.e_theta[dir]) +
                          std::norm(pat.e_phi[dir])) / (2.0 * eta0);
    const double d = 4.0 * pi * u_int / std::max(p_rad, 1e-300);
    const double g = 4.0 * pi * u_int / std::max(pat.p_in, 1e-300);
    pat.directivity_dbi[dir] = 10.0 * std::log10(std::max(d, 1e-300));
    pat.gain_dbi[dir] = 10.0 * std::log10(std::max(g, 1e-300));
  }
  return pat;
}

double sphere_average_directivity(const FarFieldPattern& pat) {
  const int nt = static_cast<int>(pat.theta_deg.size());
  const int np = static_cast<int>(pat.phi_deg.size());
  const double dth = (pat.theta_deg[1] - pat.theta_deg[0]) * pi / 180.0;
  const double dph = (pat.phi_deg[1] - pat.phi_deg[0]) * pi / 180.0;
  double sum = 0.0;
  for (int t = 0; t < nt; ++t) {
    const double wt = (t == 0 || t == nt - 1) ? 0.5 : 1.0;
    const double st = std::sin(pat.theta_deg[t] * pi / 180.0);
    for (int p = 0; p < np; ++p) {
      const double wp = (p == 0 || p == np - 1) ? 0.5 : 1.0;
      const double d = std::pow(10.0, pat.directivity_dbi[pat.index(t, p)] / 10.0);
      sum += wt * wp * d * st;
    }
  }
  return sum * dth * dph / (4.0 * pi);
}

double radiation_efficiency(double p_rad_watts, double p_in_watts) {
  if (!(p_in_watts > 0.0))
    throw AnalysisError("accepted power must be positive");
  const double eta = p_rad_watts / p_in_watts;
  if (eta > 1.01)
    throw AnalysisError(
        "radiated power exceeds accepted power by more than 1% (eta = " +
        std::to_string(eta) + "); solver and far-field transform disagree");
  return std::min(eta, 1.0);
}

namespace {

SideLobe side_lobe_from_cut(const std::vector<double>& cut) {
  // Largest local maximum outside the main lobe. The main lobe is the run
  // around the global maximum bounded by the nearest local minima.
  SideLobe sl;
  const int n = static_cast<int>(cut.size());
  if (n < 5) return sl;
  int gmax = 0;
  for (int i = 1; i < n; ++i)
    if (cut[i] > cut[gmax]) gmax = i;
  auto at = [&](int i) { return cut[((i % n) + n) % n]; };
  int left = gmax;
  while (at(left - 1) <= at(left) && gmax - left < n) --left;
  int right = gmax;
  while (at(right + 1) <= at(right) && right - gmax < n) ++right;
  if (right - left >= n - 1) return sl;  // monotone all around: no side lobe
  double best = -1e300;
  for (int i = right + 1; i < left + n; ++i) {
    if (at(i) >= at(i - 1) && at(i) >= at(i + 1)) best = std::max(best, at(i));
  }
  if (best > -1e299) {
    sl.level_dbi = best;
    sl.found = true;
  }
  return sl;
}

std::vector<double> principal_cut(const FarFieldPattern& pat, double phi_a,
                                  double phi_b) {
  // Full 360-degree great-circle cut assembled from the phi_a and phi_b
  // half-planes.
  const int nt = static_cast<int>(pat.theta_deg.size());
  const int np = static_cast<int>(pat.phi_deg.size());
  auto phi_index = [&](double phi) {
    int best = 0;
    for (int p = 0; p < np; ++p)
      if (std::abs(pat.phi_deg[p] - phi) < std::abs(pat.phi_deg[best] - phi))
        best = p;
    return best;
  };
  const int pa = phi_index(phi_a);
  const int pb = phi_index(phi_b);
  std::vector<double> cut;
  for (int t = 0; t < nt; ++t) cut.push_back(pat.gain_dbi[pat.index(t, pa)]);
  for (int t = nt - 2; t >= 1; --t)
    cut.push_back(pat.gain_dbi[pat.index(t, pb)]);
  return cut;
}

}  // namespace

AntennaMetrics summarize(const SParamResult& s,
                         const std::vector<FarFieldPattern>& patterns,
                         double threshold_db) {
  AntennaMetrics m;
  bool have_s = false;
  for (size_t k = 0; k < s.size(); ++k) {
    if (s.masked.size() == s.size() && s.masked[k]) continue;
    const double d = db20(std::abs(s.s11[k]));
    if (!have_s || d < m.min_s11_db) {
      m.min_s11_db = d;
      m.min_s11_freq_hz = s.freq_hz[k];
      have_s = true;
    }
  }
  m.bands = find_bands(s, threshold_db);

  const FarFieldPattern* peak_pat = nullptr;
  bool have_g = false;
  for (const FarFieldPattern& pat : patterns) {
    const double g = pat.peak_gain_dbi();
    // Ties break toward the lower frequency: strict > keeps the first.
    if (!have_g || g > m.peak_gain_dbi) {
      m.peak_gain_dbi = g;
      m.peak_gain_freq_hz = pat.frequency_hz;
      peak_pat = &pat;
      have_g = true;
    }
  }

  for (const Band& band : m.bands) {
    BandEfficiency be;
    be.band = band;
    double sum = 0.0;
    int cnt = 0;
    for (const FarFieldPattern& pat : patterns)
      if (pat.frequency_hz >= band.f_low_hz && pat.frequency_hz <= band.f_high_hz) {
        sum += pat.efficiency;
        ++cnt;
      }
    if (cnt == 0 && !patterns.empty()) {
      // No pattern inside the band: use the nearest recorded frequency.
      const double fc = (band.f_low_hz + band.f_high_hz) / 2.0;
      const FarFieldPattern* nearest = &patterns.front();
      for (const FarFieldPattern& pat : patterns)
        if (std::abs(pat.frequency_hz - fc) <
            std::abs(nearest->frequency_hz - fc))
          nearest = &pat;
      sum = nearest->efficiency;
      cnt = 1;
    }
    be.efficiency = cnt ? sum / cnt : 0.0;
    m.band_efficiency.push_back(be);
  }

  if (peak_pat) {
    m.side_lobe_e_plane = side_lobe_from_cut(principal_cut(*peak_pat, 0.0, 180.0));
    m.side_lobe_h_plane = side_lobe_from_cut(principal_cut(*peak_pat, 90.0, 270.0));
  }
  return m;
}

// ----- file outputs -------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AnalysisError("cannot write file: " + path);
  return out;
}

}  // namespace

void write_touchstone_s1p(const std::string& path, const SParamResult& s) {
  std::ofstream out = open_out(path);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "# GHz S RI R %g\n", s.z0);
  out << buf;
  for (size_t k = 0; k < s.size(); ++k) {
    if (s.masked.size() == s.size() && s.masked[k]) continue;
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", s.freq_hz[k] / 1e9,
                  s.s11[k].real(), s.s11[k].imag());
    out << buf;
  }
}

void write_s11_csv(const std::string& path, const SParamResult& s) {
  std::ofstream out = open_out(path);
  out << "freq_hz,s11_db,s11_re,s11_im\n";
  char buf[200];
  for (size_t k = 0; k < s.size(); ++k) {
    if (s.masked.size() == s.size() && s.masked[k]) continue;
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", s.freq_hz[k],
                  db20(std::abs(s.s11[k])), s.s11[k].real(), s.s11[k].imag());
    out << buf;
  }
}

void write_bands_json(const std::string& path, const std::vector<Band>& bands) {
  nlohmann::json j = nlohmann::json::array();
  for (const Band& b : bands)
    j.push_back({{"f_low_hz", b.f_low_hz},
                 {"f_high_hz", b.f_high_hz},
                 {"threshold_db", b.threshold_db}});
  open_out(path) << j.dump(2) << "\n";
}

void write_pattern_csv(const std::string& path, const FarFieldPattern& p) {
  std::ofstream out = open_out(path);
  out << "theta_deg,phi_deg,directivity_dbi,gain_dbi\n";
  char buf[200];
  for (size_t t = 0; t < p.theta_deg.size(); ++t)
    for (size_t q = 0; q < p.phi_deg.size(); ++q) {
      const size_t dir = t * p.phi_deg.size() + q;
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", p.theta_deg[t],
                    p.phi_deg[q], p.directivity_dbi[dir], p.gain_dbi[dir]);
      out << buf;
    }
}

std::string metrics_to_json_string(const AntennaMetrics& m) {
  nlohmann::json j;
  j["min_s11_db"] = m.min_s11_db;
  j["min_s11_freq_hz"] = m.min_s11_freq_hz;
  j["peak_gain_dbi"] = m.peak_gain_dbi;
  j["peak_gain_freq_hz"] = m.peak_gain_freq_hz;
  j["bands"] = nlohmann::json::array();
  for (const Band& b : m.bands)
    j["bands"].push_back({{"f_low_hz", b.f_low_hz},
                          {"f_high_hz", b.f_high_hz},
                          {"threshold_db", b.threshold_db}});
  j["band_efficiency"] = nlohmann::json::array();
  for (const BandEfficiency& be : m.band_efficiency)
    j["band_efficiency"].push_back({{"f_low_hz", be.band.f_low_hz},
                                    {"f_high_hz", be.band.f_high_hz},
                                    {"efficiency", be.efficiency}});
  if (m.side_lobe_e_plane.found)
    j["side_lobe_e_plane_dbi"] = m.side_lobe_e_plane.level_dbi;
  if (m.side_lobe_h_plane.found)
    j["side_lobe_h_plane_dbi"] = m.side_lobe_h_plane.level_dbi;
  return j.dump(2) + "\n";
}

void write_metrics_json(const std::string& path, const AntennaMetrics& m) {
  open_out(path) << metrics_to_json_string(m);
}

}  // namespace pf
