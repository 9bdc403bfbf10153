#include "sigt/phy/qam.hpp"

#include <cmath>
#include <numbers>

#include "sigt/tensor/tensor.hpp"

namespace sigt {

std::vector<cplx> qam_modulate(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw DimensionError("qam_modulate: odd bit count " + std::to_string(bits.size()));
  const double a = 1.0 / std::numbers::sqrt2;
  std::vector<cplx> symbols(bits.size() / 2);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::uint8_t b0 = bits[2 * i], b1 = bits[2 * i + 1];
    if (b0 > 1 || b1 > 1) throw DomainError("qam_modulate: non-binary value at bit " + std::to_string(2 * i));
    symbols[i] = {a * (1 - 2 * b0), a * (1 - 2 * b1)};
  }
  return symbols;
}

}  // namespace sigt
