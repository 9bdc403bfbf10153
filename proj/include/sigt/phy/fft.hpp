#pragma once

// Radix-2 FFT, unitary convention: both directions scale by 1/sqrt(n), so
// Parseval holds exactly and ifft(fft(x)) == x.

#include <complex>
#include <span>
#include <vector>

namespace sigt {

using cplx = std::complex<double>;

/// In-place transform; `inverse` selects the e^{+j...} kernel. Throws
/// ConfigError for lengths that are not a power of two.
void fft_inplace(std::span<cplx> data, bool inverse);

std::vector<cplx> fft(std::span<const cplx> x);
std::vector<cplx> ifft(std::span<const cplx> x);

}  // namespace sigt
