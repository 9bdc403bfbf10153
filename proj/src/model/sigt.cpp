#include "sigt/model/sigt.hpp"

namespace sigt {

Tensor tokenize(const Tensor& y) {
  if (y.rank() != 5 || y.dim(4) != 2) throw DimensionError("tokenize: expected [B, N_s, N_r, N_i, 2], got " +
                                                           shape_str(y.shape()));
  const std::size_t b = y.dim(0), n_s = y.dim(1), n_r = y.dim(2), n_i = y.dim(3);
  return reshape(permute(y, {0, 2, 1, 3, 4}), {b, n_r, n_s * n_i * 2});
}

Tensor detokenize(const Tensor& tokens, const FrameConfig& f) {
  if (tokens.rank() != 3 || tokens.dim(1) != f.n_r || tokens.dim(2) != 2 * std::size_t(f.n_s) * f.n_i)
    throw DimensionError("detokenize: tokens " + shape_str(tokens.shape()) + " do not match " + f.describe());
  return permute(reshape(tokens, {tokens.dim(0), f.n_r, f.n_s, f.n_i, 2}), {0, 2, 1, 3, 4});
}

void TokenReceiver::build_head() {
  const std::size_t d = cfg_.d_model, window = frame_.n_r / frame_.n_t;
  if (cfg_.aggregation == Aggregation::conv) {
    agg_weight_ = builder_.xavier("aggregate.weight", {d, window, d}, window * d, window * d);
    agg_bias_ = builder_.constant("aggregate.bias", {d}, 0.0);
  }
  head1_ = Linear(builder_, "head.hidden", std::size_t(frame_.n_t) * d, cfg_.mlp_hidden);
  head2_ = Linear(builder_, "head.output", cfg_.mlp_hidden, frame_.x_size());
}

Tensor TokenReceiver::aggregate(const Tensor& f) const {
  const std::size_t window = frame_.n_r / frame_.n_t;
  if (f.rank() != 3 || f.dim(1) != frame_.n_r || f.dim(2) != cfg_.d_model)
    throw DimensionError("aggregate: features " + shape_str(f.shape()) + " are not [B, N_r, d_model]");
  if (cfg_.aggregation == Aggregation::conv) return conv1d_tokens(f, agg_weight_, agg_bias_, window);
  return pool1d_tokens(f, window, window, cfg_.pool_kind);
}

Tensor TokenReceiver::head(const Tensor& p) {
  const std::size_t b = p.dim(0);
  const Tensor flat = reshape(p, {b, p.numel() / b});
  const Tensor logits = head2_(drop(relu(head1_(flat))));
  return reshape(sigmoid(logits), {b, frame_.n_s, frame_.n_t, 2});
}

Tensor TokenReceiver::forward_batch(const Tensor& y) { return head(aggregate(backbone(tokenize(y)))); }

SigT::SigT(const FrameConfig& frame, const ModelConfig& cfg) : TokenReceiver(frame, cfg) {
  input_ = Linear(builder_, "input", token_width(), cfg_.d_model);
  for (std::size_t l = 0; l < cfg_.depth; ++l)
    layers_.emplace_back(builder_, "encoder." + std::to_string(l), cfg_.d_model, cfg_.heads, cfg_.d_ff);
  build_head();
}

Tensor SigT::backbone(const Tensor& tokens) {
  Tensor x = input_(tokens);
  for (const EncoderLayer& layer : layers_) x = layer(x);
  return x;
}

LstmReceiver::LstmReceiver(const FrameConfig& frame, const ModelConfig& cfg) : TokenReceiver(frame, cfg) {
  lstm_ = Lstm(builder_, "lstm", token_width(), cfg_.d_model);
  build_head();
}

std::size_t token_receiver_parameter_count(const FrameConfig& f, const ModelConfig& c) {
  const std::size_t d = c.d_model, tok = 2 * std::size_t(f.n_s) * f.n_i, window = f.n_r / f.n_t;
  std::size_t n = 0;
  if (c.kind == ModelKind::lstm) {
    n += 4 * d * tok + 4 * d * d + 4 * d;
  } else {
    n += tok * d + d;
    const std::size_t per_layer = 3 * d * d   // per-head Q, K, V stacked over heads
                                  + d * d     // W^O
                                  + 4 * d     // two layer norms
                                  + d * c.d_ff + c.d_ff + c.d_ff * d + d;
    n += c.depth * per_layer;
  }
  if (c.aggregation == Aggregation::conv) n += d * window * d + d;
  n += f.n_t * d * c.mlp_hidden + c.mlp_hidden;
  n += c.mlp_hidden * f.x_size() + f.x_size();
  return n;
}

}  // namespace sigt
