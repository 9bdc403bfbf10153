#pragma once

// Parameter registry and the common model interface.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sigt/phy/frame_config.hpp"
#include "sigt/tensor/ops.hpp"

namespace sigt {

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

/// Creates trainable leaves and records them, in creation order, under
/// dotted names. Weights use Xavier-uniform initialisation from a seeded
/// stream; biases and norm shifts start at 0, norm gains at 1.
class ParamBuilder {
 public:
  ParamBuilder(std::vector<NamedParameter>& registry, std::uint64_t seed) : registry_(registry), rng_(seed) {}

  Tensor xavier(const std::string& name, Shape shape, std::size_t fan_in, std::size_t fan_out);
  Tensor constant(const std::string& name, Shape shape, double value);

 private:
  Tensor add(const std::string& name, Tensor t);

  std::vector<NamedParameter>& registry_;
  Rng rng_;
};

enum class ModelKind : std::uint32_t { sigt = 0, fcdnn = 1, csinet = 2, lstm = 3 };
enum class Aggregation : std::uint32_t { conv = 0, pool = 1 };

std::string to_string(ModelKind kind);
std::string to_string(Aggregation agg);
ModelKind parse_model_kind(const std::string& s);
Aggregation parse_aggregation(const std::string& s);
PoolKind parse_pool_kind(const std::string& s);
std::string to_string(PoolKind kind);

struct ModelConfig {
  ModelKind kind = ModelKind::sigt;
  // SigT and the LSTM variant.
  std::uint32_t depth = 2;
  std::uint32_t heads = 4;
  std::uint32_t d_model = 512;
  std::uint32_t d_ff = 1024;
  std::uint32_t mlp_hidden = 1024;
  Aggregation aggregation = Aggregation::conv;
  PoolKind pool_kind = PoolKind::avg;
  // FC-DNN hidden widths per antenna MLP.
  std::vector<std::uint32_t> fcdnn_hidden{1000, 500, 250};
  // CSINet: refine blocks, each 2 -> c0 -> c1 -> 2 channels.
  std::uint32_t csinet_blocks = 2;
  std::vector<std::uint32_t> csinet_channels{8, 16};
  // 0 disables dropout; the usual enabled value is 0.1. SigT and the LSTM
  // variant apply it in the MLP head only.
  double dropout_p = 0.0;
  std::uint64_t init_seed = 1;

  void validate(const FrameConfig& frame) const;
  bool operator==(const ModelConfig&) const = default;
};

class Model {
 public:
  Model(const FrameConfig& frame, const ModelConfig& cfg);
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  ModelKind kind() const { return cfg_.kind; }
  const FrameConfig& frame() const { return frame_; }
  const ModelConfig& config() const { return cfg_; }

  /// y [N_s, N_r, N_i, 2] or [B, N_s, N_r, N_i, 2] -> x_hat [(B,) N_s, N_t, 2]
  /// with entries in (0, 1).
  Tensor forward(const Tensor& y);

  std::vector<NamedParameter>& parameters() { return params_; }
  const std::vector<NamedParameter>& parameters() const { return params_; }
  std::size_t parameter_count() const;
  void zero_grad();

  void set_training(bool on) { training_ = on; }
  bool training() const { return training_; }

 protected:
  /// y is always batched here.
  virtual Tensor forward_batch(const Tensor& y) = 0;
  Tensor drop(const Tensor& x) { return dropout(x, cfg_.dropout_p, training_, dropout_rng_); }

  FrameConfig frame_;
  ModelConfig cfg_;
  std::vector<NamedParameter> params_;
  ParamBuilder builder_;

 private:
  bool training_ = false;
  Rng dropout_rng_;
};

/// 1 where x_hat >= 0.5, else 0. Not differentiated.
Tensor hard_decision(const Tensor& x_hat);

}  // namespace sigt
