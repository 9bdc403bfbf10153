#include "sigt/train/loss.hpp"

namespace sigt {

Tensor mse_loss(const Tensor& x_hat, const Tensor& x) {
  if (x_hat.shape() != x.shape())
    throw DimensionError("mse_loss: prediction " + shape_str(x_hat.shape()) + " vs target " + shape_str(x.shape()));
  const Tensor d = sub(x_hat, x);
  return mean(mul(d, d));
}

double aacc(const Tensor& x_tilde, const Tensor& x) {
  if (x_tilde.shape() != x.shape())
    throw DimensionError("aacc: decisions " + shape_str(x_tilde.shape()) + " vs bits " + shape_str(x.shape()));
  std::size_t wrong = 0;
  const auto a = x_tilde.data(), b = x.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0.0 && a[i] != 1.0) || (b[i] != 0.0 && b[i] != 1.0))
      throw DomainError("aacc: non-binary entry at index " + std::to_string(i));
    wrong += a[i] != b[i];
  }
  return 1.0 - static_cast<double>(wrong) / static_cast<double>(a.size());
}

}  // namespace sigt
