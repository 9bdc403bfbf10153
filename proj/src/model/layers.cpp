#include "sigt/model/layers.hpp"

namespace sigt {

Linear::Linear(ParamBuilder& b, const std::string& name, std::size_t in, std::size_t out, bool with_bias)
    : weight(b.xavier(name + ".weight", {out, in}, in, out)) {
  if (with_bias) bias = b.constant(name + ".bias", {out}, 0.0);
}

LayerNorm::LayerNorm(ParamBuilder& b, const std::string& name, std::size_t width)
    : gamma(b.constant(name + ".gamma", {width}, 1.0)), beta(b.constant(name + ".beta", {width}, 0.0)) {}

EncoderLayer::EncoderLayer(ParamBuilder& b, const std::string& name, std::size_t d_model, std::size_t heads,
                           std::size_t d_ff) {
  const std::size_t dh = d_model / heads;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = name + ".attn.head" + std::to_string(h);
    attn.heads.push_back({b.xavier(p + ".query", {dh, d_model}, d_model, dh),
                          b.xavier(p + ".key", {dh, d_model}, d_model, dh),
                          b.xavier(p + ".value", {dh, d_model}, d_model, dh)});
  }
  attn.w_out = b.xavier(name + ".attn.out", {d_model, d_model}, d_model, d_model);
  norm1 = LayerNorm(b, name + ".norm1", d_model);
  ff1 = Linear(b, name + ".ff1", d_model, d_ff);
  ff2 = Linear(b, name + ".ff2", d_ff, d_model);
  norm2 = LayerNorm(b, name + ".norm2", d_model);
}

Lstm::Lstm(ParamBuilder& b, const std::string& name, std::size_t in, std::size_t h)
    : w_ih(b.xavier(name + ".w_ih", {4 * h, in}, in, 4 * h)),
      w_hh(b.xavier(name + ".w_hh", {4 * h, h}, h, 4 * h)),
      bias(b.constant(name + ".bias", {4 * h}, 0.0)),
      hidden(h) {}

Tensor Lstm::operator()(const Tensor& x) const {
  if (x.rank() != 3) throw DimensionError("lstm: expected [B, n, in], got " + shape_str(x.shape()));
  const std::size_t batch = x.dim(0), n = x.dim(1), h = hidden;
  const Tensor x_gates = linear(x, w_ih, bias);  // input part for every step at once
  Tensor h_t = Tensor::zeros({batch, h});
  Tensor c_t = Tensor::zeros({batch, h});
  std::vector<Tensor> outputs;
  outputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Tensor g = add(reshape(slice(x_gates, 1, t, 1), {batch, 4 * h}), linear(h_t, w_hh, Tensor()));
    const Tensor i = sigmoid(slice(g, 1, 0, h));
    const Tensor f = sigmoid(slice(g, 1, h, h));
    const Tensor c = tanh(slice(g, 1, 2 * h, h));
    const Tensor o = sigmoid(slice(g, 1, 3 * h, h));
    c_t = add(mul(f, c_t), mul(i, c));
    h_t = mul(o, tanh(c_t));
    outputs.push_back(reshape(h_t, {batch, 1, h}));
  }
  return concat(outputs, 1);
}

Conv2d::Conv2d(ParamBuilder& b, const std::string& name, std::size_t c_in, std::size_t c_out, std::size_t k)
    : weight(b.xavier(name + ".weight", {c_out, c_in, k, k}, c_in * k * k, c_out * k * k)),
      bias(b.constant(name + ".bias", {c_out}, 0.0)) {}

}  // namespace sigt
