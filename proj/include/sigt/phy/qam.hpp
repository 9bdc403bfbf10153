#pragma once

// Gray-mapped QPSK: (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
// b0 rides on the real part, b1 on the imaginary part.

#include <cstdint>
#include <span>
#include <vector>

#include "sigt/phy/fft.hpp"

namespace sigt {

using Bits = std::vector<std::uint8_t>;

/// Consecutive bit pairs to symbols. Throws DomainError on non-binary input
/// and DimensionError on an odd bit count.
std::vector<cplx> qam_modulate(std::span<const std::uint8_t> bits);

}  // namespace sigt
