#pragma once

// Central finite-difference oracle for reverse-mode gradients.
//
// The oracle only re-evaluates the forward function; it never touches the
// tape, so it stays independent of every backward rule it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sigt/tensor/ops.hpp"
#include "sigt/tensor/tensor.hpp"

namespace sigt::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "input#i[j] analytic=.. numeric=.."
};

// Relative error with a floor proportional to the loss magnitude: below it,
// central differences are dominated by cancellation in f(x+h) - f(x-h).
inline double relative_error(double analytic, double numeric, double loss_scale) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6 * std::max(1.0, loss_scale)});
  return std::abs(analytic - numeric) / denom;
}

// `loss_fn` must rebuild a rank-0 loss from the current values of `inputs`.
// When `max_per_input` is non-zero, a seeded random subset of coordinates is
// probed per input (large model parameter blocks).
inline GradCheckResult check_gradients(const std::function<Tensor()>& loss_fn, std::vector<Tensor> inputs,
                                       double step = 1e-5, std::size_t max_per_input = 0,
                                       std::uint64_t seed = 1) {
  for (Tensor& t : inputs) t.zero_grad();
  const Tensor loss = loss_fn();
  const double loss_scale = std::abs(loss.item());
  backward(loss);

  GradCheckResult result;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Tensor& t = inputs[i];
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    std::vector<std::size_t> coords(t.numel());
    for (std::size_t j = 0; j < coords.size(); ++j) coords[j] = j;
    if (max_per_input != 0 && coords.size() > max_per_input) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_per_input);
    }
    for (std::size_t j : coords) {
      auto values = t.mutable_data();
      const double saved = values[j];
      double plus, minus;
      {
        NoGradGuard guard;
        values[j] = saved + step;
        plus = loss_fn().item();
        values[j] = saved - step;
        minus = loss_fn().item();
      }
      values[j] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double err = relative_error(analytic[j], numeric, loss_scale);
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst = "input#" + std::to_string(i) + "[" + std::to_string(j) +
                       "] analytic=" + std::to_string(analytic[j]) + " numeric=" + std::to_string(numeric);
      }
    }
  }
  return result;
}

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0,
                            bool trainable = true) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = u(rng);
  return trainable ? Tensor::parameter(std::move(shape), std::move(v)) : Tensor::from_data(std::move(shape), std::move(v));
}

// sum(y * r) for a fixed random r: every output coordinate gets a distinct
// upstream gradient.
inline Tensor random_projection(const Tensor& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(mul(y, random_tensor(y.shape(), rng, -1.0, 1.0, /*trainable=*/false)));
}

}  // namespace sigt::testing
