// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "patchforge/errors.hpp"
#include "patchforge/huygens.hpp"
#include "patchforge/solver.hpp"

namespace pf {

struct SParamResult {
  std::vector<double> freq_hz;               // strictly increasing
  std::vector<std::complex<double>> s11;
  std::vector<uint8_t> masked;               // incident below numerical floor
  double z0 = 50.0;

  size_t size() const { return freq_hz.size(); }
};

enum class Window {
  Auto,         // rectangular when decayed 60 dB, else tail taper
  Rectangular,
  TailCosine,   // raised-cosine over the last 10% of samples
};

// Wave decomposition of the recorded port series:
//   a = (V + Z0 I) / (2 sqrt(Z0)),  b = (V - Z0 I) / (2 sqrt(Z0)),
//   S11(f) = b/a on the padded FFT grid, restricted to the source's
//   -20 dB band. Samples whose incident spectrum sits below the numerical
//   floor are flagged in `masked`.
SParamResult s11_from_port(const PortRecord& record, Window window = Window::Auto,
                           int pad_factor = 4);

// Port spectra at arbitrary frequencies (exact single-frequency DFT with
// the solver's staggered sample times).
struct PortSpectrum {
  std::complex<double> v;
  std::complex<double> i;
};
PortSpectrum port_spectrum_at(const PortRecord& record, double f_hz);

// Time-averaged power accepted by the structure at f (same spectral
// normalization as the Huygens record).
double port_accepted_power(const PortRecord& record, double f_hz);

struct Band {
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;
  double threshold_db = -10.0;

  double width_hz() const { return f_high_hz - f_low_hz; }
};

// Maximal disjoint intervals where |S11| in dB stays at or below the
// threshold; edges by linear interpolation between straddling samples.
std::vector<Band> find_bands(const SParamResult& s, double threshold_db = -10.0);

struct AngularGrid {
  int n_theta = 181;  // 0..180 deg inclusive
  int n_phi = 73;     // 0..360 deg inclusive (seam repeated)
};

struct FarFieldPattern {
  double frequency_hz = 0.0;
  std::vector<double> theta_deg;  // size n_theta
  std::vector<double> phi_deg;    // size n_phi
  // Row-major [i_theta * n_phi + i_phi]; far fields at 1 m with the
  // exp(-jkr)/r factor removed.
  std::vector<std::complex<double>> e_theta, e_phi;
  std::vector<double> directivity_dbi, gain_dbi;
  double p_rad = 0.0;       // Poynting flux through the box
  double p_in = 0.0;        // accepted port power (= p_rad when no port)
  double efficiency = 1.0;  // clamped p_rad / p_in

  size_t index(int t, int p) const {
    return static_cast<size_t>(t) * phi_deg.size() + p;
  }
  double peak_directivity_dbi() const;
  double peak_gain_dbi() const;
};

// Near-to-far-field transform of the recorded equivalence surface at one
// of its frequencies. p_in_watts <= 0 means "no port": gain equals
// directivity.
FarFieldPattern ntff_transform(const HuygensData& huygens, double f_hz,
                               const AngularGrid& grid = AngularGrid{},
                               double p_in_watts = 0.0);

// (1/4pi) * integral of D over the sphere; 1 for a consistent pattern.
double sphere_average_directivity(const FarFieldPattern& pattern);

// eta = p_rad / p_in, clamped to 1 when the overshoot is within 1%;
// beyond that the solver and transform disagree and this throws.
double radiation_efficiency(double p_rad_watts, double p_in_watts);

struct BandEfficiency {
  Band band;
  double efficiency = 0.0;
};

struct SideLobe {
  double level_dbi = 0.0;
  bool found = false;
};

struct AntennaMetrics {
  double min_s11_db = 0.0;
  double min_s11_freq_hz = 0.0;
  double peak_gain_dbi = 0.0;
  double peak_gain_freq_hz = 0.0;
  std::vector<Band> bands;
  std::vector<BandEfficiency> band_efficiency;
  SideLobe side_lobe_e_plane;  // phi = 0/180 cut at the peak-gain frequency
  SideLobe side_lobe_h_plane;  // phi = 90/270 cut
};

AntennaMetrics summarize(const SParamResult& s,
                         const std::vector<FarFieldPattern>& patterns,
                         double threshold_db = -10.0);

// ----- file outputs ------------------------------------------------------

void write_touchstone_s1p(const std::string& path, const SParamResult& s);
void write_s11_csv(const std::string& path, const SParamResult& s);
void write_bands_json(const std::string& path, const std::vector<Band>& bands);
void write_pattern_csv(const std::string& path, const FarFieldPattern& p);
void write_metrics_json(const std::string& path, const AntennaMetrics& m);
std::string metrics_to_json_string(const AntennaMetrics& m);

}  // namespace pf
