// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

namespace pf {

// In-place iterative radix-2 FFT, X[k] = sum_n x[n] exp(-2 pi i n k / N).
// N must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

size_t next_pow2(size_t n);

// Single-frequency transform of a uniformly sampled real series:
//   X(f) = dt * sum_n x[n] exp(-2 pi i f (t0 + n dt))
std::complex<double> dft_at(const std::vector<double>& samples, double dt,
                            double t0, double freq_hz);

}  // namespace pf
