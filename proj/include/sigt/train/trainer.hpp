#pragma once

// Minibatch MSE training with per-epoch AACC on both splits.
//
// Epoch 0 is the untrained model's evaluation; epochs 1..E each make one
// shuffled pass over the training set. A minibatch is processed in
// micro-batches whose gradients accumulate, so memory stays bounded for
// large batch sizes without changing the update.

#include <functional>
#include <vector>

#include "sigt/model/module.hpp"
#include "sigt/phy/dataset.hpp"
#include "sigt/train/optim.hpp"

namespace sigt {

enum class OptimizerKind { adam, sgd };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& s);

struct RunConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamConfig adam;  // lr is shared with SGD
  std::size_t batch_size = 640;
  std::size_t micro_batch = 64;
  std::size_t epochs = 200;
  std::size_t nb = 0;  // if nonzero, train on the first nb * batch_size samples only
  std::uint64_t seed = 1;
  bool record_time = false;  // wall-clock seconds in metrics; off keeps output reproducible

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_aacc = 0.0;
  double test_aacc = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;
  double best_test_aacc = 0.0;
  std::vector<std::vector<double>> best_params;  // parameter values at best_epoch

  const EpochMetrics& final() const { return history.back(); }
};

struct Evaluation {
  double loss = 0.0;
  double aacc = 0.0;
};

/// y [B, N_s, N_r, N_i, 2] and bits [B, N_s, N_t, 2] for the given samples.
Tensor batch_inputs(const Dataset& ds, std::span<const std::size_t> indices);
Tensor batch_targets(const Dataset& ds, std::span<const std::size_t> indices);

/// Eval-mode loss and AACC over a whole dataset.
Evaluation evaluate(Model& model, const Dataset& ds, std::size_t chunk = 64);

/// Throws NumericError (naming epoch, batch and loss) on a non-finite loss
/// and ConfigError if the datasets do not match the model's frame.
TrainResult train(Model& model, const Dataset& train_set, const Dataset& test_set, const RunConfig& cfg,
                  const std::function<void(const EpochMetrics&)>& on_epoch = {});

/// Copies parameter values into the model (e.g. TrainResult::best_params).
void load_parameters(Model& model, const std::vector<std::vector<double>>& values);

}  // namespace sigt
