#pragma once

// Building blocks shared by SigT and the baselines. Each holds handles to
// parameters owned by a Model's registry.

#include <string>

#include "sigt/model/module.hpp"
#include "sigt/tensor/attention.hpp"

namespace sigt {

struct Linear {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out], may be undefined

  Linear() = default;
  Linear(ParamBuilder& b, const std::string& name, std::size_t in, std::size_t out, bool with_bias = true);
  Tensor operator()(const Tensor& x) const { return linear(x, weight, bias); }
};

struct LayerNorm {
  Tensor gamma, beta;

  LayerNorm() = default;
  LayerNorm(ParamBuilder& b, const std::string& name, std::size_t width);
  Tensor operator()(const Tensor& x) const { return layer_norm(x, gamma, beta); }
};

/// Post-norm transformer encoder layer over tokens [B, n, d].
struct EncoderLayer {
  AttentionParams attn;
  LayerNorm norm1, norm2;
  Linear ff1, ff2;

  EncoderLayer() = default;
  EncoderLayer(ParamBuilder& b, const std::string& name, std::size_t d_model, std::size_t heads, std::size_t d_ff);

  Tensor operator()(const Tensor& x) const {
    const Tensor a = layer_norm(add(x, multi_head_attention(x, attn)), norm1.gamma, norm1.beta);
    return layer_norm(add(a, ff2(relu(ff1(a)))), norm2.gamma, norm2.beta);
  }
};

/// Single-layer LSTM over the token axis of x [B, n, in]; returns every
/// hidden state, [B, n, hidden]. Gate order in the stacked weights: input,
/// forget, cell, output.
struct Lstm {
  Tensor w_ih;  // [4h, in]
  Tensor w_hh;  // [4h, h]
  Tensor bias;  // [4h]
  std::size_t hidden = 0;

  Lstm() = default;
  Lstm(ParamBuilder& b, const std::string& name, std::size_t in, std::size_t hidden);
  Tensor operator()(const Tensor& x) const;
};

struct Conv2d {
  Tensor weight;  // [c_out, c_in, k, k]
  Tensor bias;

  Conv2d() = default;
  Conv2d(ParamBuilder& b, const std::string& name, std::size_t c_in, std::size_t c_out, std::size_t kernel);
  Tensor operator()(const Tensor& x) const { return conv2d_same(x, weight, bias); }
};

}  // namespace sigt
