#include <algorithm>
#include <cmath>
#include <limits>

#include "op_support.hpp"
#include "sigt/tensor/ops.hpp"

namespace sigt {

using detail::input;
using detail::input_data;
using detail::k;
using detail::make_result;
using kernels::Trans;

Tensor softmax(const Tensor& x, std::size_t axis) {
  const Shape& s = x.shape();
  if (axis >= s.size())
    throw DimensionError("softmax: axis " + std::to_string(axis) + " out of range for " + shape_str(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t n = s[axis];
  const double* xd = x.data().data();
  std::vector<double> y(x.numel());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, xd[base + j * inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(xd[base + j * inner] - mx);
        y[base + j * inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < n; ++j) y[base + j * inner] /= total;
    }
  }
  return make_result(s, y, {&x}, "softmax", [y, outer, inner, n](detail::TensorImpl& o) {
    auto* in = input(o, 0);
    if (!in) return;
    auto g = in->grad_buffer();
    for (std::size_t a = 0; a < outer; ++a) {
      for (std::size_t b = 0; b < inner; ++b) {
        const std::size_t base = a * n * inner + b;
        double dotp = 0.0;
        for (std::size_t j = 0; j < n; ++j) dotp += o.grad[base + j * inner] * y[base + j * inner];
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t idx = base + j * inner;
          g[idx] += y[idx] * (o.grad[idx] - dotp);
        }
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (x.rank() == 0) throw DimensionError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (gamma.shape() != Shape{d} || beta.shape() != Shape{d})
    throw DimensionError("layer_norm: gain " + shape_str(gamma.shape()) + " / shift " + shape_str(beta.shape()) +
                         " do not match last axis of " + shape_str(x.shape()));
  const std::size_t rows = x.numel() / d;
  const double* xd = x.data().data();
  const double* gd = gamma.data().data();
  const double* bd = beta.data().data();
  std::vector<double> xhat(x.numel());
  std::vector<double> rstd(rows);
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xd + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double rs = 1.0 / std::sqrt(var + eps);
    rstd[r] = rs;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mu) * rs;
      xhat[r * d + j] = h;
      out[r * d + j] = gd[j] * h + bd[j];
    }
  }
  return make_result(x.shape(), std::move(out), {&x, &gamma, &beta}, "layer_norm",
                     [xhat = std::move(xhat), rstd = std::move(rstd), rows, d](detail::TensorImpl& o) {
                       const auto& gd = input_data(o, 1);
                       auto* ix = input(o, 0);
                       auto* ig = input(o, 1);
                       auto* ib = input(o, 2);
                       std::vector<double> dxhat(d);
                       for (std::size_t r = 0; r < rows; ++r) {
                         const double* go = o.grad.data() + r * d;
                         const double* h = xhat.data() + r * d;
                         if (ig) {
                           auto gg = ig->grad_buffer();
                           for (std::size_t j = 0; j < d; ++j) gg[j] += go[j] * h[j];
                         }
                         if (ib) k().axpy(d, 1.0, go, ib->grad_buffer().data());
                         if (ix) {
                           double m1 = 0.0, m2 = 0.0;
                           for (std::size_t j = 0; j < d; ++j) {
                             dxhat[j] = go[j] * gd[j];
                             m1 += dxhat[j];
                             m2 += dxhat[j] * h[j];
                           }
                           m1 /= static_cast<double>(d);
                           m2 /= static_cast<double>(d);
                           double* gx = ix->grad_buffer().data() + r * d;
                           for (std::size_t j = 0; j < d; ++j) gx[j] += rstd[r] * (dxhat[j] - m1 - h[j] * m2);
                         }
                       }
                     });
}

namespace {

struct TokenGeometry {
  std::size_t batch;  // product of leading axes
  std::size_t n;      // tokens
  std::size_t c;      // channels per token
};

TokenGeometry token_geometry(const Tensor& x, const char* op) {
  if (x.rank() < 2)
    throw DimensionError(std::string(op) + ": expected [..., tokens, channels], got " + shape_str(x.shape()));
  const std::size_t c = x.shape()[x.rank() - 1];
  const std::size_t n = x.shape()[x.rank() - 2];
  return {x.numel() / (n * c), n, c};
}

}  // namespace

Tensor conv1d_tokens(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride) {
  const auto geo = token_geometry(x, "conv1d_tokens");
  detail::require_rank(weight, 3, "conv1d_tokens", "weight");
  const std::size_t c_out = weight.dim(0), kw = weight.dim(1);
  if (weight.dim(2) != geo.c)
    throw DimensionError("conv1d_tokens: weight " + shape_str(weight.shape()) + " does not match input channels of " +
                         shape_str(x.shape()));
  if (bias.defined() && bias.shape() != Shape{c_out})
    throw DimensionError("conv1d_tokens: bias " + shape_str(bias.shape()) + " does not match " +
                         std::to_string(c_out) + " output channels");
  if (stride == 0 || kw > geo.n)
    throw DimensionError("conv1d_tokens: kernel " + std::to_string(kw) + " / stride " + std::to_string(stride) +
                         " invalid for " + std::to_string(geo.n) + " tokens");
  const std::size_t n_out = (geo.n - kw) / stride + 1;
  const std::size_t kc = kw * geo.c;
  const std::size_t rows = geo.batch * n_out;

  // Windows of kw consecutive tokens are contiguous in memory.
  auto im2col = [geo, n_out, kc, stride](const double* xd) {
    std::vector<double> cols(geo.batch * n_out * kc);
    for (std::size_t b = 0; b < geo.batch; ++b)
      for (std::size_t t = 0; t < n_out; ++t) {
        const double* src = xd + (b * geo.n + t * stride) * geo.c;
        std::copy(src, src + kc, cols.data() + (b * n_out + t) * kc);
      }
    return cols;
  };
  const auto cols = im2col(x.data().data());
  std::vector<double> out(rows * c_out, 0.0);
  if (bias.defined()) {
    const double* bd = bias.data().data();
    for (std::size_t r = 0; r < rows; ++r) std::copy(bd, bd + c_out, out.data() + r * c_out);
  }
  k().gemm(Trans::no, Trans::yes, rows, c_out, kc, cols.data(), kc, weight.data().data(), kc, out.data(), c_out);

  Shape out_shape = x.shape();
  out_shape[out_shape.size() - 2] = n_out;
  out_shape.back() = c_out;
  return make_result(std::move(out_shape), std::move(out), {&x, &weight, &bias}, "conv1d_tokens",
                     [geo, n_out, kc, rows, c_out, stride, im2col](detail::TensorImpl& o) {
                       const auto& xd = input_data(o, 0);
                       const auto& wd = input_data(o, 1);
                       if (auto* iw = input(o, 1)) {
                         const auto c = im2col(xd.data());
                         k().gemm(Trans::yes, Trans::no, c_out, kc, rows, o.grad.data(), c_out, c.data(), kc,
                                  iw->grad_buffer().data(), kc);
                       }
                       if (auto* ib = input(o, 2)) {
                         auto gb = ib->grad_buffer();
                         for (std::size_t r = 0; r < rows; ++r) k().axpy(c_out, 1.0, o.grad.data() + r * c_out, gb.data());
                       }
                       if (auto* ix = input(o, 0)) {
                         std::vector<double> dcols(rows * kc, 0.0);
                         k().gemm(Trans::no, Trans::no, rows, kc, c_out, o.grad.data(), c_out, wd.data(), kc,
                                  dcols.data(), kc);
                         double* gx = ix->grad_buffer().data();
                         for (std::size_t b = 0; b < geo.batch; ++b)
                           for (std::size_t t = 0; t < n_out; ++t)
                             k().axpy(kc, 1.0, dcols.data() + (b * n_out + t) * kc,
                                      gx + (b * geo.n + t * stride) * geo.c);
                       }
                     });
}

Tensor pool1d_tokens(const Tensor& x, std::size_t window, std::size_t stride, PoolKind kind) {
  const auto geo = token_geometry(x, "pool1d_tokens");
  if (window == 0 || stride == 0 || window > geo.n)
    throw DimensionError("pool1d_tokens: window " + std::to_string(window) + " / stride " + std::to_string(stride) +
                         " invalid for " + std::to_string(geo.n) + " tokens");
  const std::size_t n_out = (geo.n - window) / stride + 1;
  const std::size_t c = geo.c;
  const double* xd = x.data().data();
  std::vector<double> out(geo.batch * n_out * c);
  std::vector<std::size_t> argmax;
  if (kind == PoolKind::max) argmax.resize(out.size());
  for (std::size_t b = 0; b < geo.batch; ++b) {
    for (std::size_t t = 0; t < n_out; ++t) {
      double* dst = out.data() + (b * n_out + t) * c;
      const std::size_t first = b * geo.n + t * stride;
      if (kind == PoolKind::avg) {
        std::fill(dst, dst + c, 0.0);
        for (std::size_t w = 0; w < window; ++w) k().axpy(c, 1.0, xd + (first + w) * c, dst);
        for (std::size_t j = 0; j < c; ++j) dst[j] /= static_cast<double>(window);
      } else {
        for (std::size_t j = 0; j < c; ++j) {
          std::size_t best = first;
          for (std::size_t w = 1; w < window; ++w)
            if (xd[(first + w) * c + j] > xd[best * c + j]) best = first + w;
          dst[j] = xd[best * c + j];
          argmax[(b * n_out + t) * c + j] = best * c + j;
        }
      }
    }
  }
  Shape out_shape = x.shape();
  out_shape[out_shape.size() - 2] = n_out;
  return make_result(std::move(out_shape), std::move(out), {&x}, "pool1d_tokens",
                     [geo, n_out, c, window, stride, kind, argmax = std::move(argmax)](detail::TensorImpl& o) {
                       auto* ix = input(o, 0);
                       if (!ix) return;
                       double* gx = ix->grad_buffer().data();
                       if (kind == PoolKind::max) {
                         for (std::size_t i = 0; i < argmax.size(); ++i) gx[argmax[i]] += o.grad[i];
                         return;
                       }
                       const double inv = 1.0 / static_cast<double>(window);
                       for (std::size_t b = 0; b < geo.batch; ++b)
                         for (std::size_t t = 0; t < n_out; ++t)
                           for (std::size_t w = 0; w < window; ++w)
                             k().axpy(c, inv, o.grad.data() + (b * n_out + t) * c,
                                      gx + (b * geo.n + t * stride + w) * c);
                     });
}

namespace {

struct Conv2dGeometry {
  std::size_t batch, c_in, h, w, c_out, kh, kw;
  std::size_t hw() const { return h * w; }
  std::size_t kdim() const { return c_in * kh * kw; }
};

// cols[(c*kh + i)*kw + j][y*w + x] = img[c][y + i - kh/2][x + j - kw/2] (zero outside).
void im2col_2d(const Conv2dGeometry& g, const double* img, double* cols) {
  const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>(g.kh / 2);
  const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>(g.kw / 2);
  const auto H = static_cast<std::ptrdiff_t>(g.h);
  const auto W = static_cast<std::ptrdiff_t>(g.w);
  for (std::size_t c = 0; c < g.c_in; ++c)
    for (std::size_t i = 0; i < g.kh; ++i)
      for (std::size_t j = 0; j < g.kw; ++j) {
        double* row = cols + ((c * g.kh + i) * g.kw + j) * g.hw();
        for (std::ptrdiff_t y = 0; y < H; ++y) {
          const std::ptrdiff_t sy = y + static_cast<std::ptrdiff_t>(i) - ph;
          for (std::ptrdiff_t xx = 0; xx < W; ++xx) {
            const std::ptrdiff_t sx = xx + static_cast<std::ptrdiff_t>(j) - pw;
            row[y * W + xx] = (sy >= 0 && sy < H && sx >= 0 && sx < W) ? img[(c * g.h + sy) * g.w + sx] : 0.0;
          }
        }
      }
}

void col2im_2d(const Conv2dGeometry& g, const double* cols, double* img) {
  const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>(g.kh / 2);
  const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>(g.kw / 2);
  const auto H = static_cast<std::ptrdiff_t>(g.h);
  const auto W = static_cast<std::ptrdiff_t>(g.w);
  for (std::size_t c = 0; c < g.c_in; ++c)
    for (std::size_t i = 0; i < g.kh; ++i)
      for (std::size_t j = 0; j < g.kw; ++j) {
        const double* row = cols + ((c * g.kh + i) * g.kw + j) * g.hw();
        for (std::ptrdiff_t y = 0; y < H; ++y) {
          const std::ptrdiff_t sy = y + static_cast<std::ptrdiff_t>(i) - ph;
          if (sy < 0 || sy >= H) continue;
          for (std::ptrdiff_t xx = 0; xx < W; ++xx) {
            const std::ptrdiff_t sx = xx + static_cast<std::ptrdiff_t>(j) - pw;
            if (sx >= 0 && sx < W) img[(c * g.h + sy) * g.w + sx] += row[y * W + xx];
          }
        }
      }
}

}  // namespace

Tensor conv2d_same(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  detail::require_rank(x, 4, "conv2d_same", "input");
  detail::require_rank(weight, 4, "conv2d_same", "weight");
  const Conv2dGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), weight.dim(0), weight.dim(2), weight.dim(3)};
  if (weight.dim(1) != g.c_in || g.kh % 2 == 0 || g.kw % 2 == 0)
    throw DimensionError("conv2d_same: weight " + shape_str(weight.shape()) + " incompatible with input " +
                         shape_str(x.shape()) + " (odd kernels required)");
  if (bias.defined() && bias.shape() != Shape{g.c_out})
    throw DimensionError("conv2d_same: bias " + shape_str(bias.shape()) + " does not match " +
                         std::to_string(g.c_out) + " output channels");
  const std::size_t hw = g.hw(), kd = g.kdim();
  std::vector<double> out(g.batch * g.c_out * hw, 0.0);
  std::vector<double> cols(kd * hw);
  const double* xd = x.data().data();
  const double* wd = weight.data().data();
  for (std::size_t b = 0; b < g.batch; ++b) {
    double* ob = out.data() + b * g.c_out * hw;
    if (bias.defined())
      for (std::size_t co = 0; co < g.c_out; ++co) std::fill(ob + co * hw, ob + (co + 1) * hw, bias.data()[co]);
    im2col_2d(g, xd + b * g.c_in * hw, cols.data());
    k().gemm(Trans::no, Trans::no, g.c_out, hw, kd, wd, kd, cols.data(), hw, ob, hw);
  }
  return make_result({g.batch, g.c_out, g.h, g.w}, std::move(out), {&x, &weight, &bias}, "conv2d_same",
                     [g](detail::TensorImpl& o) {
                       const auto& xd = input_data(o, 0);
                       const auto& wd = input_data(o, 1);
                       auto* ix = input(o, 0);
                       auto* iw = input(o, 1);
                       auto* ib = input(o, 2);
                       const std::size_t hw = g.hw(), kd = g.kdim();
                       std::vector<double> cols(kd * hw);
                       for (std::size_t b = 0; b < g.batch; ++b) {
                         const double* go = o.grad.data() + b * g.c_out * hw;
                         if (ib) {
                           auto gb = ib->grad_buffer();
                           for (std::size_t co = 0; co < g.c_out; ++co)
                             for (std::size_t p = 0; p < hw; ++p) gb[co] += go[co * hw + p];
                         }
                         if (iw) {
                           im2col_2d(g, xd.data() + b * g.c_in * hw, cols.data());
                           k().gemm(Trans::no, Trans::yes, g.c_out, kd, hw, go, hw, cols.data(), hw,
                                    iw->grad_buffer().data(), kd);
                         }
                         if (ix) {
                           std::fill(cols.begin(), cols.end(), 0.0);
                           k().gemm(Trans::yes, Trans::no, kd, hw, g.c_out, wd.data(), kd, go, hw, cols.data(), hw);
                           col2im_2d(g, cols.data(), ix->grad_buffer().data() + b * g.c_in * hw);
                         }
                       }
                     });
}

Tensor dropout(const Tensor& x, double p, bool training, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("dropout: probability must lie in [0, 1), got " + std::to_string(p));
  if (!training || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = uniform(rng) < p ? 0.0 : keep_scale;
  std::vector<double> out(x.numel());
  k().mul(out.size(), x.data().data(), mask.data(), out.data());
  return make_result(x.shape(), std::move(out), {&x}, "dropout", [mask = std::move(mask)](detail::TensorImpl& o) {
    if (auto* in = input(o, 0)) {
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < mask.size(); ++i) g[i] += o.grad[i] * mask[i];
    }
  });
}

}  // namespace sigt
