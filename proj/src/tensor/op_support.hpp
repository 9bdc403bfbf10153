#pragma once

// Internal helpers shared by the op implementations.

#include <functional>
#include <initializer_list>
#include <string>

#include "sigt/kernels/kernels.hpp"
#include "sigt/tensor/tensor.hpp"

namespace sigt::detail {

using BackwardFn = std::function<void(TensorImpl& out)>;

inline bool should_record(std::initializer_list<const Tensor*> inputs) {
  if (!grad_enabled()) return false;
  for (const Tensor* t : inputs)
    if (t->defined() && t->requires_grad()) return true;
  return false;
}

// Builds the op result. When recording, the node keeps every input alive so
// backward rules can read input values through out.node->inputs[i].
inline Tensor make_result(Shape shape, std::vector<double> data,
                          std::initializer_list<const Tensor*> inputs, const char* op,
                          BackwardFn backward) {
  Tensor out = Tensor::from_data(std::move(shape), std::move(data));
  if (!should_record(inputs)) return out;
  auto& impl = *out.impl();
  impl.requires_grad = true;
  impl.node = std::make_shared<GradNode>();
  impl.node->op = op;
  for (const Tensor* t : inputs) impl.node->inputs.push_back(t->defined() ? t->impl() : nullptr);
  impl.node->backward = std::move(backward);
  return out;
}

inline TensorImpl* input(TensorImpl& out, std::size_t i) {
  TensorImpl* p = out.node->inputs[i].get();
  return (p && p->requires_grad) ? p : nullptr;
}

inline const std::vector<double>& input_data(TensorImpl& out, std::size_t i) {
  return out.node->inputs[i]->data;
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

inline void require_rank(const Tensor& t, std::size_t rank, const char* op, const char* what) {
  if (t.rank() != rank)
    throw DimensionError(std::string(op) + ": " + what + " must be rank " + std::to_string(rank) +
                         ", got " + shape_str(t.shape()));
}

inline const kernels::KernelTable& k() { return kernels::active(); }

}  // namespace sigt::detail
