#pragma once

#include <cstdint>
#include <vector>

#include "sigt/model/module.hpp"

namespace sigt {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m, v;  // per parameter, lazily sized
};

/// One bias-corrected Adam update from each parameter's current gradient.
void adam_step(std::vector<NamedParameter>& params, AdamState& state, const AdamConfig& cfg);

/// params -= lr * grad (no momentum).
void sgd_step(std::vector<NamedParameter>& params, double lr);

}  // namespace sigt
