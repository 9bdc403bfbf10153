#include "sigt/train/optim.hpp"

#include <cmath>

#include "sigt/kernels/kernels.hpp"

namespace sigt {

void adam_step(std::vector<NamedParameter>& params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), {});
    state.v.assign(params.size(), {});
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 / (1.0 - std::pow(cfg.beta1, t));
  const double c2 = 1.0 / (1.0 - std::pow(cfg.beta2, t));
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i].tensor;
    const auto grad = p.grad();
    if (grad.size() != p.numel()) throw ContractError("adam_step: parameter " + params[i].name + " has no gradient");
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != p.numel()) {
      m.assign(p.numel(), 0.0);
      v.assign(p.numel(), 0.0);
    }
    auto data = p.mutable_data();
    k.adam(data.size(), data.data(), grad.data(), m.data(), v.data(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, c1, c2);
  }
}

void sgd_step(std::vector<NamedParameter>& params, double lr) {
  const auto& k = kernels::active();
  for (auto& np : params) {
    Tensor& p = np.tensor;
    const auto grad = p.grad();
    if (grad.size() != p.numel()) throw ContractError("sgd_step: parameter " + np.name + " has no gradient");
    auto data = p.mutable_data();
    k.axpy(data.size(), -lr, grad.data(), data.data());
  }
}

}  // namespace sigt
