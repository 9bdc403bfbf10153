#include <numeric>

#include "op_support.hpp"
#include "sigt/tensor/ops.hpp"

namespace sigt {

using detail::input;
using detail::k;
using detail::make_result;

namespace {

// Calls fn(out_offset, in_offset) for every element of the permuted view,
// walking the output in row-major order.
template <class Fn>
void for_each_permuted(const Shape& in_shape, std::span<const std::size_t> perm, Fn&& fn) {
  const std::size_t rank = in_shape.size();
  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t i = rank; i-- > 1;) in_stride[i - 1] = in_stride[i] * in_shape[i];
  std::vector<std::size_t> out_dim(rank), stride(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    out_dim[i] = in_shape[perm[i]];
    stride[i] = in_stride[perm[i]];
  }
  const std::size_t total = shape_numel(in_shape);
  if (rank == 0) {
    fn(std::size_t{0}, std::size_t{0});
    return;
  }
  // Innermost axis handled as a tight loop.
  const std::size_t last = rank - 1;
  const std::size_t inner = out_dim[last];
  const std::size_t inner_stride = stride[last];
  std::vector<std::size_t> idx(rank, 0);
  std::size_t in_off = 0;
  for (std::size_t out_off = 0; out_off < total; out_off += inner) {
    for (std::size_t j = 0; j < inner; ++j) fn(out_off + j, in_off + j * inner_stride);
    for (std::size_t ax = last; ax-- > 0;) {
      in_off += stride[ax];
      if (++idx[ax] < out_dim[ax]) break;
      in_off -= stride[ax] * out_dim[ax];
      idx[ax] = 0;
    }
  }
}

}  // namespace

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel())
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {&x}, "reshape", [](detail::TensorImpl& o) {
    if (auto* in = input(o, 0)) k().axpy(o.grad.size(), 1.0, o.grad.data(), in->grad_buffer().data());
  });
}

Tensor permute(const Tensor& x, std::span<const std::size_t> perm) {
  const Shape& s = x.shape();
  if (perm.size() != s.size())
    throw DimensionError("permute: permutation of length " + std::to_string(perm.size()) + " for shape " +
                         shape_str(s));
  std::vector<bool> seen(s.size(), false);
  for (std::size_t p : perm) {
    if (p >= s.size() || seen[p]) throw DimensionError("permute: invalid axis permutation for " + shape_str(s));
    seen[p] = true;
  }
  Shape out_shape(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out_shape[i] = s[perm[i]];
  std::vector<double> out(x.numel());
  const double* xd = x.data().data();
  for_each_permuted(s, perm, [&](std::size_t o, std::size_t i) { out[o] = xd[i]; });
  std::vector<std::size_t> perm_copy(perm.begin(), perm.end());
  return make_result(std::move(out_shape), std::move(out), {&x}, "permute",
                     [in_shape = s, perm_copy](detail::TensorImpl& o) {
                       if (auto* in = input(o, 0)) {
                         double* g = in->grad_buffer().data();
                         const double* go = o.grad.data();
                         for_each_permuted(in_shape, perm_copy, [&](std::size_t oo, std::size_t ii) { g[ii] += go[oo]; });
                       }
                     });
}

Tensor permute(const Tensor& x, std::initializer_list<std::size_t> perm) {
  return permute(x, std::span<const std::size_t>(perm.begin(), perm.size()));
}

Tensor transpose(const Tensor& x) {
  detail::require_rank(x, 2, "transpose", "input");
  return permute(x, {1, 0});
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size())
    throw DimensionError("concat: axis " + std::to_string(axis) + " out of range for " + shape_str(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const Tensor& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i)
      if (i != axis && s[i] != first[i]) ok = false;
    if (!ok) throw DimensionError("concat: " + shape_str(s) + " incompatible with " + shape_str(first));
    out_shape[axis] += s[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= first[i];
  for (std::size_t i = axis + 1; i < first.size(); ++i) inner *= first[i];
  const std::size_t out_row = out_shape[axis] * inner;
  std::vector<double> out(outer * out_row);
  std::vector<std::size_t> widths;
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    const std::size_t w = p.dim(axis) * inner;
    const double* pd = p.data().data();
    for (std::size_t o = 0; o < outer; ++o) std::copy(pd + o * w, pd + (o + 1) * w, out.data() + o * out_row + offset);
    widths.push_back(w);
    offset += w;
  }

  Tensor result = Tensor::from_data(out_shape, std::move(out));
  bool record = false;
  if (grad_enabled())
    for (const Tensor& p : parts) record = record || p.requires_grad();
  if (!record) return result;
  auto& impl = *result.impl();
  impl.requires_grad = true;
  impl.node = std::make_shared<detail::GradNode>();
  impl.node->op = "concat";
  for (const Tensor& p : parts) impl.node->inputs.push_back(p.impl());
  impl.node->backward = [outer, out_row, widths](detail::TensorImpl& o) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      const std::size_t w = widths[i];
      if (auto* in = input(o, i)) {
        double* g = in->grad_buffer().data();
        for (std::size_t r = 0; r < outer; ++r) k().axpy(w, 1.0, o.grad.data() + r * out_row + off, g + r * w);
      }
      off += w;
    }
  };
  return result;
}

Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length) {
  const Shape& s = x.shape();
  if (axis >= s.size() || length == 0 || start + length > s[axis])
    throw DimensionError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                         ") on axis " + std::to_string(axis) + " invalid for " + shape_str(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t in_row = s[axis] * inner;
  const std::size_t w = length * inner;
  const std::size_t off = start * inner;
  std::vector<double> out(outer * w);
  const double* xd = x.data().data();
  for (std::size_t o = 0; o < outer; ++o)
    std::copy(xd + o * in_row + off, xd + o * in_row + off + w, out.data() + o * w);
  Shape out_shape = s;
  out_shape[axis] = length;
  return make_result(std::move(out_shape), std::move(out), {&x}, "slice",
                     [outer, in_row, w, off](detail::TensorImpl& o) {
                       if (auto* in = input(o, 0)) {
                         double* g = in->grad_buffer().data();
                         for (std::size_t r = 0; r < outer; ++r)
                           k().axpy(w, 1.0, o.grad.data() + r * w, g + r * in_row + off);
                       }
                     });
}

}  // namespace sigt
