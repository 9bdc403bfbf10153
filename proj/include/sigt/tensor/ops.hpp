#pragma once

// Differentiable tensor operations. Each op validates shapes, computes its
// value eagerly and, when the tape is recording, attaches a backward rule.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sigt/tensor/tensor.hpp"

namespace sigt {

using Rng = std::mt19937_64;

// ---- elementwise --------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
/// x + bias, bias broadcast along the last axis of x.
Tensor add_bias(const Tensor& x, const Tensor& bias);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

// ---- reductions ---------------------------------------------------------

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Sums out one axis; the result drops that axis.
Tensor sum_axis(const Tensor& x, std::size_t axis);

// ---- linear algebra -----------------------------------------------------

/// Rank-2 matrix product.
Tensor matmul(const Tensor& a, const Tensor& b);
/// Batched product over the leading axis: a[g] * b[g] (or a[g] * b[g]^T).
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);
/// x[..., in] * weight[out, in]^T + bias[out]. bias may be undefined.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);
/// Independent linear maps per group: x[g, n, in] -> [g, n, out].
Tensor grouped_linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// ---- shape --------------------------------------------------------------

Tensor reshape(const Tensor& x, Shape shape);
/// result.shape[i] = x.shape[perm[i]].
Tensor permute(const Tensor& x, std::span<const std::size_t> perm);
Tensor permute(const Tensor& x, std::initializer_list<std::size_t> perm);
/// Rank-2 transpose.
Tensor transpose(const Tensor& x);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length);

// ---- neural-network primitives ------------------------------------------

/// Exp-normalises every slice along `axis` (max-subtracted).
Tensor softmax(const Tensor& x, std::size_t axis);
/// Normalises over the last axis, then applies gain and shift.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

enum class PoolKind { avg, max };

/// 1-D convolution along the token axis of x[..., n, c_in].
/// weight[c_out, kernel, c_in], bias[c_out]; output [..., (n-kernel)/stride+1, c_out].
Tensor conv1d_tokens(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride);
/// Pooling along the token axis of x[..., n, c].
Tensor pool1d_tokens(const Tensor& x, std::size_t window, std::size_t stride, PoolKind kind);
/// 2-D convolution with zero "same" padding, stride 1.
/// x[b, c_in, h, w], weight[c_out, c_in, kh, kw] (odd kh, kw), bias[c_out].
Tensor conv2d_same(const Tensor& x, const Tensor& weight, const Tensor& bias);
/// Inverted dropout. Identity when !training or p == 0.
Tensor dropout(const Tensor& x, double p, bool training, Rng& rng);

}  // namespace sigt
