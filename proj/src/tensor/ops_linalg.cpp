#include "op_support.hpp"
#include "sigt/tensor/ops.hpp"

namespace sigt {

using detail::input;
using detail::input_data;
using detail::k;
using detail::make_result;
using kernels::Trans;

Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require_rank(a, 2, "matmul", "lhs");
  detail::require_rank(b, 2, "matmul", "rhs");
  if (a.dim(1) != b.dim(0))
    throw DimensionError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  const std::size_t m = a.dim(0), kk = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  k().gemm(Trans::no, Trans::no, m, n, kk, a.data().data(), kk, b.data().data(), n, out.data(), n);
  return make_result({m, n}, std::move(out), {&a, &b}, "matmul", [m, kk, n](detail::TensorImpl& o) {
    const auto& ad = input_data(o, 0);
    const auto& bd = input_data(o, 1);
    if (auto* in = input(o, 0))
      k().gemm(Trans::no, Trans::yes, m, kk, n, o.grad.data(), n, bd.data(), n, in->grad_buffer().data(), kk);
    if (auto* in = input(o, 1))
      k().gemm(Trans::yes, Trans::no, kk, n, m, ad.data(), kk, o.grad.data(), n, in->grad_buffer().data(), n);
  });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  detail::require_rank(a, 3, "bmm", "lhs");
  detail::require_rank(b, 3, "bmm", "rhs");
  const std::size_t g = a.dim(0), m = a.dim(1), kk = a.dim(2);
  const std::size_t bk = transpose_b ? b.dim(2) : b.dim(1);
  const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
  if (b.dim(0) != g || bk != kk)
    throw DimensionError("bmm: incompatible operands " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()) + (transpose_b ? " (rhs transposed)" : ""));
  std::vector<double> out(g * m * n, 0.0);
  const Trans tb = transpose_b ? Trans::yes : Trans::no;
  const std::size_t ldb = transpose_b ? kk : n;
  for (std::size_t i = 0; i < g; ++i)
    k().gemm(Trans::no, tb, m, n, kk, a.data().data() + i * m * kk, kk, b.data().data() + i * kk * n, ldb,
             out.data() + i * m * n, n);
  return make_result({g, m, n}, std::move(out), {&a, &b}, "bmm",
                     [g, m, kk, n, transpose_b](detail::TensorImpl& o) {
                       const auto& ad = input_data(o, 0);
                       const auto& bd = input_data(o, 1);
                       auto* ia = input(o, 0);
                       auto* ib = input(o, 1);
                       for (std::size_t i = 0; i < g; ++i) {
                         const double* go = o.grad.data() + i * m * n;
                         const double* ai = ad.data() + i * m * kk;
                         const double* bi = bd.data() + i * kk * n;
                         if (ia) {
                           double* ga = ia->grad_buffer().data() + i * m * kk;
                           if (transpose_b)  // dA = dC * B  (B stored n x k)
                             k().gemm(Trans::no, Trans::no, m, kk, n, go, n, bi, kk, ga, kk);
                           else  // dA = dC * B^T (B stored k x n)
                             k().gemm(Trans::no, Trans::yes, m, kk, n, go, n, bi, n, ga, kk);
                         }
                         if (ib) {
                           double* gb = ib->grad_buffer().data() + i * kk * n;
                           if (transpose_b)  // dB = dC^T * A, shape n x k
                             k().gemm(Trans::yes, Trans::no, n, kk, m, go, n, ai, kk, gb, kk);
                           else  // dB = A^T * dC, shape k x n
                             k().gemm(Trans::yes, Trans::no, kk, n, m, ai, kk, go, n, gb, n);
                         }
                       }
                     });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  detail::require_rank(weight, 2, "linear", "weight");
  if (x.rank() == 0 || x.shape().back() != weight.dim(1))
    throw DimensionError("linear: input " + shape_str(x.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  const std::size_t in = weight.dim(1), out_w = weight.dim(0);
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != out_w))
    throw DimensionError("linear: bias " + shape_str(bias.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  const std::size_t rows = x.numel() / in;
  std::vector<double> out(rows * out_w, 0.0);
  if (bias.defined()) {
    const double* bd = bias.data().data();
    for (std::size_t r = 0; r < rows; ++r) std::copy(bd, bd + out_w, out.data() + r * out_w);
  }
  k().gemm(Trans::no, Trans::yes, rows, out_w, in, x.data().data(), in, weight.data().data(), in, out.data(),
           out_w);
  Shape out_shape = x.shape();
  out_shape.back() = out_w;
  return make_result(std::move(out_shape), std::move(out), {&x, &weight, &bias}, "linear",
                     [rows, in, out_w](detail::TensorImpl& o) {
                       const auto& xd = input_data(o, 0);
                       const auto& wd = input_data(o, 1);
                       if (auto* ix = input(o, 0))
                         k().gemm(Trans::no, Trans::no, rows, in, out_w, o.grad.data(), out_w, wd.data(), in,
                                  ix->grad_buffer().data(), in);
                       if (auto* iw = input(o, 1))
                         k().gemm(Trans::yes, Trans::no, out_w, in, rows, o.grad.data(), out_w, xd.data(), in,
                                  iw->grad_buffer().data(), in);
                       if (o.node->inputs[2]) {
                         if (auto* ib = input(o, 2)) {
                           auto gb = ib->grad_buffer();
                           for (std::size_t r = 0; r < rows; ++r)
                             k().axpy(out_w, 1.0, o.grad.data() + r * out_w, gb.data());
                         }
                       }
                     });
}

Tensor grouped_linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  detail::require_rank(x, 3, "grouped_linear", "input");
  detail::require_rank(weight, 3, "grouped_linear", "weight");
  const std::size_t g = x.dim(0), n = x.dim(1), in = x.dim(2), out_w = weight.dim(1);
  if (weight.dim(0) != g || weight.dim(2) != in)
    throw DimensionError("grouped_linear: input " + shape_str(x.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  if (bias.defined() && (bias.rank() != 2 || bias.dim(0) != g || bias.dim(1) != out_w))
    throw DimensionError("grouped_linear: bias " + shape_str(bias.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  std::vector<double> out(g * n * out_w, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    double* oi = out.data() + i * n * out_w;
    if (bias.defined()) {
      const double* bd = bias.data().data() + i * out_w;
      for (std::size_t r = 0; r < n; ++r) std::copy(bd, bd + out_w, oi + r * out_w);
    }
    k().gemm(Trans::no, Trans::yes, n, out_w, in, x.data().data() + i * n * in, in,
             weight.data().data() + i * out_w * in, in, oi, out_w);
  }
  return make_result({g, n, out_w}, std::move(out), {&x, &weight, &bias}, "grouped_linear",
                     [g, n, in, out_w](detail::TensorImpl& o) {
                       const auto& xd = input_data(o, 0);
                       const auto& wd = input_data(o, 1);
                       auto* ix = input(o, 0);
                       auto* iw = input(o, 1);
                       auto* ib = o.node->inputs[2] ? input(o, 2) : nullptr;
                       for (std::size_t i = 0; i < g; ++i) {
                         const double* go = o.grad.data() + i * n * out_w;
                         if (ix)
                           k().gemm(Trans::no, Trans::no, n, in, out_w, go, out_w, wd.data() + i * out_w * in, in,
                                    ix->grad_buffer().data() + i * n * in, in);
                         if (iw)
                           k().gemm(Trans::yes, Trans::no, out_w, in, n, go, out_w, xd.data() + i * n * in, in,
                                    iw->grad_buffer().data() + i * out_w * in, in);
                         if (ib) {
                           double* gb = ib->grad_buffer().data() + i * out_w;
                           for (std::size_t r = 0; r < n; ++r) k().axpy(out_w, 1.0, go + r * out_w, gb);
                         }
                       }
                     });
}

}  // namespace sigt
