#include <cmath>

#include "op_support.hpp"
#include "sigt/tensor/ops.hpp"

namespace sigt {

using detail::input;
using detail::input_data;
using detail::k;
using detail::make_result;

Tensor add(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  k().add(out.size(), a.data().data(), b.data().data(), out.data());
  return make_result(a.shape(), std::move(out), {&a, &b}, "add", [](detail::TensorImpl& o) {
    for (std::size_t i = 0; i < 2; ++i)
      if (auto* in = input(o, i)) k().axpy(o.grad.size(), 1.0, o.grad.data(), in->grad_buffer().data());
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "sub");
  const auto ad = a.data();
  const auto bd = b.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] - bd[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, "sub", [](detail::TensorImpl& o) {
    if (auto* in = input(o, 0)) k().axpy(o.grad.size(), 1.0, o.grad.data(), in->grad_buffer().data());
    if (auto* in = input(o, 1)) k().axpy(o.grad.size(), -1.0, o.grad.data(), in->grad_buffer().data());
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  k().mul(out.size(), a.data().data(), b.data().data(), out.data());
  return make_result(a.shape(), std::move(out), {&a, &b}, "mul", [](detail::TensorImpl& o) {
    const auto& ad = input_data(o, 0);
    const auto& bd = input_data(o, 1);
    const std::size_t n = o.grad.size();
    if (auto* in = input(o, 0)) {
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) g[i] += o.grad[i] * bd[i];
    }
    if (auto* in = input(o, 1)) {
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) g[i] += o.grad[i] * ad[i];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.data().begin(), x.data().end());
  for (double& v : out) v *= factor;
  return make_result(x.shape(), std::move(out), {&x}, "scale", [factor](detail::TensorImpl& o) {
    if (auto* in = input(o, 0)) k().axpy(o.grad.size(), factor, o.grad.data(), in->grad_buffer().data());
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  if (x.rank() == 0 || bias.rank() != 1 || bias.dim(0) != x.shape().back())
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) +
                         " does not match last axis of " + shape_str(x.shape()));
  const std::size_t width = bias.dim(0);
  const std::size_t rows = x.numel() / width;
  std::vector<double> out(x.data().begin(), x.data().end());
  const double* b = bias.data().data();
  for (std::size_t r = 0; r < rows; ++r) k().add(width, out.data() + r * width, b, out.data() + r * width);
  return make_result(x.shape(), std::move(out), {&x, &bias}, "add_bias",
                     [rows, width](detail::TensorImpl& o) {
                       if (auto* in = input(o, 0))
                         k().axpy(o.grad.size(), 1.0, o.grad.data(), in->grad_buffer().data());
                       if (auto* in = input(o, 1)) {
                         auto g = in->grad_buffer();
                         for (std::size_t r = 0; r < rows; ++r)
                           k().axpy(width, 1.0, o.grad.data() + r * width, g.data());
                       }
                     });
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.numel());
  k().relu(out.size(), x.data().data(), out.data());
  return make_result(x.shape(), std::move(out), {&x}, "relu", [](detail::TensorImpl& o) {
    if (auto* in = input(o, 0))
      k().relu_backward(o.grad.size(), in->data.data(), o.grad.data(), in->grad_buffer().data());
  });
}

Tensor sigmoid(const Tensor& x) {
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Branch keeps exp() from overflowing for large |x|.
    const double v = xd[i];
    if (v >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      out[i] = e / (1.0 + e);
    }
  }
  return make_result(x.shape(), out, {&x}, "sigmoid", [y = out](detail::TensorImpl& o) {
    if (auto* in = input(o, 0)) {
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < y.size(); ++i) g[i] += o.grad[i] * y[i] * (1.0 - y[i]);
    }
  });
}

Tensor tanh(const Tensor& x) {
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xd[i]);
  return make_result(x.shape(), out, {&x}, "tanh", [y = out](detail::TensorImpl& o) {
    if (auto* in = input(o, 0)) {
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < y.size(); ++i) g[i] += o.grad[i] * (1.0 - y[i] * y[i]);
    }
  });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result({}, {s}, {&x}, "sum", [](detail::TensorImpl& o) {
    if (auto* in = input(o, 0))
      for (double& g : in->grad_buffer()) g += o.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.numel());
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result({}, {s / n}, {&x}, "mean", [n](detail::TensorImpl& o) {
    if (auto* in = input(o, 0))
      for (double& g : in->grad_buffer()) g += o.grad[0] / n;
  });
}

Tensor sum_axis(const Tensor& x, std::size_t axis) {
  const Shape& s = x.shape();
  if (axis >= s.size())
    throw DimensionError("sum_axis: axis " + std::to_string(axis) + " out of range for " + shape_str(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t n = s[axis];
  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != axis) out_shape.push_back(s[i]);
  std::vector<double> out(outer * inner, 0.0);
  const double* xd = x.data().data();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t j = 0; j < n; ++j) k().axpy(inner, 1.0, xd + (o * n + j) * inner, out.data() + o * inner);
  return make_result(std::move(out_shape), std::move(out), {&x}, "sum_axis",
                     [outer, inner, n](detail::TensorImpl& o) {
                       if (auto* in = input(o, 0)) {
                         auto g = in->grad_buffer();
                         for (std::size_t a = 0; a < outer; ++a)
                           for (std::size_t j = 0; j < n; ++j)
                             k().axpy(inner, 1.0, o.grad.data() + a * inner, g.data() + (a * n + j) * inner);
                       }
                     });
}

}  // namespace sigt
