#include "sigt/tensor/attention.hpp"

#include <cmath>

#include "sigt/tensor/ops.hpp"

namespace sigt {

std::size_t AttentionParams::model_width() const {
  if (heads.empty()) throw DimensionError("attention: no heads");
  return heads.front().w_query.dim(1);
}

std::size_t AttentionParams::key_width() const {
  if (heads.empty()) throw DimensionError("attention: no heads");
  return heads.front().w_key.dim(0);
}

std::size_t AttentionParams::value_width() const {
  if (heads.empty()) throw DimensionError("attention: no heads");
  return heads.front().w_value.dim(0);
}

namespace {

void check_finite(const Tensor& t, const char* what) {
  for (double v : t.data())
    if (!std::isfinite(v)) throw NumericError(std::string("attention: non-finite value in ") + what);
}

void validate_head(const AttentionHead& h, std::size_t d, std::size_t d_qk, std::size_t d_v) {
  if (h.w_query.rank() != 2 || h.w_key.rank() != 2 || h.w_value.rank() != 2)
    throw DimensionError("attention: projection weights must be rank 2");
  if (h.w_query.shape() != Shape{d_qk, d} || h.w_key.shape() != Shape{d_qk, d} ||
      h.w_value.shape() != Shape{d_v, d})
    throw DimensionError("attention: head projections " + shape_str(h.w_query.shape()) + ", " +
                         shape_str(h.w_key.shape()) + ", " + shape_str(h.w_value.shape()) +
                         " inconsistent (query and key widths must match, all inputs width " +
                         std::to_string(d) + ")");
  check_finite(h.w_query, "W^Q");
  check_finite(h.w_key, "W^K");
  check_finite(h.w_value, "W^V");
}

void check_tokens(const Tensor& tokens, std::size_t d) {
  if ((tokens.rank() != 2 && tokens.rank() != 3) || tokens.shape().back() != d)
    throw DimensionError("attention: tokens " + shape_str(tokens.shape()) + " do not have width " +
                         std::to_string(d));
}

// [b, n, h*w] -> [b*h, n, w]
Tensor split_heads(const Tensor& x, std::size_t batch, std::size_t n, std::size_t h, std::size_t w) {
  return reshape(permute(reshape(x, {batch, n, h, w}), {0, 2, 1, 3}), {batch * h, n, w});
}

// Core attention on already-projected, head-split operands [g, n, w].
Tensor attend(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t d_qk) {
  const Tensor scores = scale(bmm(q, k, /*transpose_b=*/true), 1.0 / std::sqrt(static_cast<double>(d_qk)));
  // scores[g, j, i] = q_j . k_i; normalise over the key index i.
  return bmm(softmax(scores, 2), v);
}

}  // namespace

void AttentionParams::validate() const {
  if (heads.empty()) throw DimensionError("attention: at least one head is required");
  const std::size_t d = model_width(), d_qk = key_width(), d_v = value_width();
  for (const auto& h : heads) validate_head(h, d, d_qk, d_v);
  if (w_out.rank() != 2 || w_out.dim(1) != heads.size() * d_v)
    throw DimensionError("attention: W^O " + shape_str(w_out.shape()) + " must take " +
                         std::to_string(heads.size() * d_v) + " concatenated head features");
  check_finite(w_out, "W^O");
}

Tensor self_attention(const Tensor& tokens, const AttentionHead& head) {
  const std::size_t d = head.w_query.dim(1);
  validate_head(head, d, head.w_query.dim(0), head.w_value.dim(0));
  check_tokens(tokens, d);
  const bool batched = tokens.rank() == 3;
  const std::size_t n = tokens.dim(tokens.rank() - 2);
  const Tensor x = batched ? tokens : reshape(tokens, {1, n, d});
  const Tensor q = linear(x, head.w_query, Tensor());
  const Tensor k = linear(x, head.w_key, Tensor());
  const Tensor v = linear(x, head.w_value, Tensor());
  const Tensor out = attend(q, k, v, head.w_query.dim(0));
  return batched ? out : reshape(out, {n, head.w_value.dim(0)});
}

Tensor multi_head_attention(const Tensor& tokens, const AttentionParams& params) {
  params.validate();
  const std::size_t d = params.model_width(), d_qk = params.key_width(), d_v = params.value_width();
  const std::size_t h = params.head_count();
  check_tokens(tokens, d);
  const bool batched = tokens.rank() == 3;
  const std::size_t batch = batched ? tokens.dim(0) : 1;
  const std::size_t n = tokens.dim(tokens.rank() - 2);
  const Tensor x = batched ? tokens : reshape(tokens, {1, n, d});

  // Stacking the per-head projections turns h small GEMMs into one.
  std::vector<Tensor> wq, wk, wv;
  for (const auto& head : params.heads) {
    wq.push_back(head.w_query);
    wk.push_back(head.w_key);
    wv.push_back(head.w_value);
  }
  const Tensor q = split_heads(linear(x, concat(wq, 0), Tensor()), batch, n, h, d_qk);
  const Tensor k = split_heads(linear(x, concat(wk, 0), Tensor()), batch, n, h, d_qk);
  const Tensor v = split_heads(linear(x, concat(wv, 0), Tensor()), batch, n, h, d_v);
  const Tensor heads = attend(q, k, v, d_qk);  // [b*h, n, d_v]
  const Tensor joined = reshape(permute(reshape(heads, {batch, h, n, d_v}), {0, 2, 1, 3}), {batch, n, h * d_v});
  const Tensor out = linear(joined, params.w_out, Tensor());
  return batched ? out : reshape(out, {n, params.w_out.dim(0)});
}

}  // namespace sigt
