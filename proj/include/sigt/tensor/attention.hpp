#pragma once

// Scaled dot-product self-attention over a set of tokens.
//
// Tokens are rows: a [n, d] matrix (or [batch, n, d]). A head projects them to
// queries, keys and values with W^Q [d_qk, d], W^K [d_qk, d], W^V [d_v, d] and
// returns, for every query token j, the convex combination
//     out_j = sum_i softmax_i(k_i . q_j / sqrt(d_qk)) v_i.
// Multi-head attention concatenates the head outputs along the feature axis
// and maps them back through W^O [d_out, h * d_v]. No positional information
// is injected, so permuting the input tokens permutes the output rows.

#include <vector>

#include "sigt/tensor/tensor.hpp"

namespace sigt {

struct AttentionHead {
  Tensor w_query;  // [d_qk, d]
  Tensor w_key;    // [d_qk, d]
  Tensor w_value;  // [d_v, d]
};

struct AttentionParams {
  std::vector<AttentionHead> heads;
  Tensor w_out;  // [d_out, h * d_v]

  std::size_t head_count() const { return heads.size(); }
  std::size_t model_width() const;
  std::size_t key_width() const;
  std::size_t value_width() const;

  /// Checks head count, d_Q == d_K, consistent head shapes, W^O width and
  /// finite weights. Throws DimensionError / NumericError.
  void validate() const;
};

/// Single-head attention, tokens [n, d] or [batch, n, d] -> [..., n, d_v].
Tensor self_attention(const Tensor& tokens, const AttentionHead& head);

/// Multi-head attention, tokens [n, d] or [batch, n, d] -> [..., n, d_out].
Tensor multi_head_attention(const Tensor& tokens, const AttentionParams& params);

}  // namespace sigt
