#include "sigt/phy/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "sigt/phy/frame_config.hpp"

namespace sigt {

void fft_inplace(std::span<cplx> a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw ConfigError("fft: length " + std::to_string(n) + " is not a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // Twiddles for the largest stage, cached per length; stage `len` uses
  // every (n/len)-th entry.
  thread_local std::vector<cplx> twiddle;
  if (twiddle.size() != n / 2) {
    twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle[k] = {std::cos(angle), std::sin(angle)};
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2, step = n / len;
    for (std::size_t k = 0; k < half; ++k) {
      const cplx w = inverse ? std::conj(twiddle[k * step]) : twiddle[k * step];
      const double wr = w.real(), wi = w.imag();
      for (std::size_t start = 0; start < n; start += len) {
        const cplx u = a[start + k];
        const cplx x = a[start + k + half];
        const cplx v(wr * x.real() - wi * x.imag(), wr * x.imag() + wi * x.real());
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }

  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (cplx& v : a) v *= norm;
}

std::vector<cplx> fft(std::span<const cplx> x) {
  std::vector<cplx> out(x.begin(), x.end());
  fft_inplace(out, false);
  return out;
}

std::vector<cplx> ifft(std::span<const cplx> x) {
  std::vector<cplx> out(x.begin(), x.end());
  fft_inplace(out, true);
  return out;
}

}  // namespace sigt
