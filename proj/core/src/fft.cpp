// SPDX-License-Identifier: Apache-2.0
#include "patchforge/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "patchforge/constants.hpp"

namespace pf {

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0)
    throw std::invalid_argument("fft length must be a power of two");
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::complex<double> dft_at(const std::vector<double>& samples, double dt,
                            double t0, double freq_hz) {
  const double w = 2.0 * pi * freq_hz;
  // Phase recurrence plus periodic resync keeps the cost linear without
  // accumulating rounding drift on long records.
  std::complex<double> acc(0.0, 0.0);
  const std::complex<double> step(std::cos(-w * dt), std::sin(-w * dt));
  std::complex<double> phase(std::cos(-w * t0), std::sin(-w * t0));
  for (size_t n = 0; n < samples.size(); ++n) {
    if ((n & 1023) == 0) {
      const double t = t0 + static_cast<double>(n) * dt;
      phase = {std::cos(-w * t), std::sin(-w * t)};
    }
    acc += samples[n] * phase;
    phase *= step;
  }
  return acc * dt;
}

}  // namespace pf
