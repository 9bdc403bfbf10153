#pragma once

#include "sigt/tensor/ops.hpp"

namespace sigt {

/// Mean squared error over every bit of every signal in the batch.
Tensor mse_loss(const Tensor& x_hat, const Tensor& x);

/// Average accuracy: 1 minus the fraction of differing bits over all
/// signals (1 - BER). Both arguments must be binary; throws DomainError
/// otherwise and DimensionError on a shape mismatch.
double aacc(const Tensor& x_tilde, const Tensor& x);

}  // namespace sigt
