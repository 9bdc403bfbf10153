#pragma once

// Token receivers: every receive antenna's full frequency-domain observation
// is one token. A backbone maps the N_r tokens to N_r features of width
// d_model, the aggregation reduces them to N_t features, and a two-layer MLP
// head with a sigmoid produces the N_s x N_t x 2 bit probabilities.
//
// SigT uses a transformer encoder as backbone; LstmReceiver swaps in a
// recurrent layer and keeps everything else.

#include <vector>

#include "sigt/model/layers.hpp"

namespace sigt {

/// y [B, N_s, N_r, N_i, 2] -> tokens [B, N_r, 2 N_s N_i]; element
/// (s, i, c) of a token sits at (s N_i + i) 2 + c.
Tensor tokenize(const Tensor& y);
/// Inverse of tokenize.
Tensor detokenize(const Tensor& tokens, const FrameConfig& frame);

class TokenReceiver : public Model {
 public:
  /// features [B, N_r, d_model] -> [B, N_t, d_model].
  Tensor aggregate(const Tensor& features) const;
  /// p [B, N_t, d_model] -> x_hat [B, N_s, N_t, 2].
  Tensor head(const Tensor& p);
  /// tokens [B, N_r, d] -> features [B, N_r, d_model].
  virtual Tensor backbone(const Tensor& tokens) = 0;

  std::size_t token_width() const { return 2 * std::size_t(frame_.n_s) * frame_.n_i; }
  const Tensor& aggregation_weight() const { return agg_weight_; }
  const Tensor& aggregation_bias() const { return agg_bias_; }
  const Linear& head_hidden() const { return head1_; }
  const Linear& head_output() const { return head2_; }

 protected:
  TokenReceiver(const FrameConfig& frame, const ModelConfig& cfg) : Model(frame, cfg) {}
  /// Registers aggregation and head parameters; call after the backbone.
  void build_head();
  Tensor forward_batch(const Tensor& y) override;

 private:
  Tensor agg_weight_, agg_bias_;  // conv mode only: [d, window, d], [d]
  Linear head1_, head2_;
};

class SigT : public TokenReceiver {
 public:
  SigT(const FrameConfig& frame, const ModelConfig& cfg);

  /// Input projection followed by the encoder stack.
  Tensor backbone(const Tensor& tokens) override;

  const Linear& input_projection() const { return input_; }
  const std::vector<EncoderLayer>& layers() const { return layers_; }

 private:
  Linear input_;
  std::vector<EncoderLayer> layers_;
};

class LstmReceiver : public TokenReceiver {
 public:
  LstmReceiver(const FrameConfig& frame, const ModelConfig& cfg);
  Tensor backbone(const Tensor& tokens) override { return lstm_(tokens); }

 private:
  Lstm lstm_;
};

/// Closed-form parameter count of SigT / LstmReceiver for a configuration.
std::size_t token_receiver_parameter_count(const FrameConfig& frame, const ModelConfig& cfg);

}  // namespace sigt
