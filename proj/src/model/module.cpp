#include "sigt/model/module.hpp"

#include <cmath>

#include "sigt/phy/dataset.hpp"

namespace sigt {

Tensor ParamBuilder::add(const std::string& name, Tensor t) {
  for (const auto& p : registry_)
    if (p.name == name) throw ContractError("duplicate parameter name " + name);
  registry_.push_back({name, t});
  return t;
}

Tensor ParamBuilder::xavier(const std::string& name, Shape shape, std::size_t fan_in, std::size_t fan_out) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = dist(rng_);
  return add(name, Tensor::parameter(std::move(shape), std::move(v)));
}

Tensor ParamBuilder::constant(const std::string& name, Shape shape, double value) {
  std::vector<double> v(shape_numel(shape), value);
  return add(name, Tensor::parameter(std::move(shape), std::move(v)));
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::sigt: return "sigt";
    case ModelKind::fcdnn: return "fcdnn";
    case ModelKind::csinet: return "csinet";
    case ModelKind::lstm: return "lstm";
  }
  return "?";
}

std::string to_string(Aggregation agg) { return agg == Aggregation::conv ? "conv" : "pool"; }
std::string to_string(PoolKind kind) { return kind == PoolKind::avg ? "avg" : "max"; }

ModelKind parse_model_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::sigt, ModelKind::fcdnn, ModelKind::csinet, ModelKind::lstm})
    if (s == to_string(k)) return k;
  throw ConfigError("model: unknown kind '" + s + "' (sigt|fcdnn|csinet|lstm)");
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "conv") return Aggregation::conv;
  if (s == "pool") return Aggregation::pool;
  throw ConfigError("agg: unknown aggregation '" + s + "' (conv|pool)");
}

PoolKind parse_pool_kind(const std::string& s) {
  if (s == "avg") return PoolKind::avg;
  if (s == "max") return PoolKind::max;
  throw ConfigError("pool: unknown pooling '" + s + "' (avg|max)");
}

void ModelConfig::validate(const FrameConfig& frame) const {
  frame.validate();
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(dropout_p >= 0.0 && dropout_p < 1.0, "dropout: probability must lie in [0, 1)");
  switch (kind) {
    case ModelKind::sigt:
    case ModelKind::lstm:
      require(d_model >= 1 && mlp_hidden >= 1, "d_model/mlp_hidden: widths must be positive");
      require(frame.n_r % frame.n_t == 0, "nr: receive antennas (" + std::to_string(frame.n_r) +
                                              ") must be a multiple of transmit antennas (" +
                                              std::to_string(frame.n_t) + ") for aggregation");
      if (kind == ModelKind::sigt) {
        require(heads >= 1, "heads: need at least one attention head");
        require(d_model % heads == 0, "heads: d_model " + std::to_string(d_model) + " is not divisible by " +
                                          std::to_string(heads) + " heads");
        require(depth == 0 || d_ff >= 1, "d_ff: feed-forward width must be positive");
      }
      break;
    case ModelKind::fcdnn:
      require(!fcdnn_hidden.empty(), "fcdnn_hidden: need at least one hidden layer");
      for (auto w : fcdnn_hidden) require(w >= 1, "fcdnn_hidden: widths must be positive");
      break;
    case ModelKind::csinet:
      require(csinet_channels.size() == 2 && csinet_channels[0] >= 1 && csinet_channels[1] >= 1,
              "csinet_channels: need two positive channel widths");
      break;
  }
}

Model::Model(const FrameConfig& frame, const ModelConfig& cfg)
    : frame_(frame),
      cfg_(cfg),
      builder_(params_, cfg.init_seed),
      dropout_rng_(derive_seed(cfg.init_seed, Split::pool, 0xD0D0)) {
  cfg_.validate(frame_);
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.numel();
  return n;
}

void Model::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

Tensor Model::forward(const Tensor& y) {
  const Shape expect{frame_.n_s, frame_.n_r, frame_.n_i, 2};
  const bool single = y.rank() == 4;
  if (!(single || y.rank() == 5) || !std::equal(expect.begin(), expect.end(), y.shape().end() - 4))
    throw DimensionError("model: input " + shape_str(y.shape()) + " does not match frame " + shape_str(expect));
  const Tensor batched = single ? reshape(y, {1, frame_.n_s, frame_.n_r, frame_.n_i, 2}) : y;
  const Tensor out = forward_batch(batched);
  return single ? reshape(out, {frame_.n_s, frame_.n_t, 2}) : out;
}

Tensor hard_decision(const Tensor& x_hat) {
  std::vector<double> v(x_hat.data().begin(), x_hat.data().end());
  for (double& x : v) x = x >= 0.5 ? 1.0 : 0.0;
  return Tensor::from_data(x_hat.shape(), std::move(v));
}

}  // namespace sigt
