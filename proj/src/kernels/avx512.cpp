#include "sigt/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace sigt::kernels::avx512 {
namespace {

struct Vec {
  using reg = __m512d;
  static constexpr std::size_t width = 8;
  static reg zero() { return _mm512_setzero_pd(); }
  static reg set1(double x) { return _mm512_set1_pd(x); }
  static reg load(const double* p) { return _mm512_loadu_pd(p); }
  static void store(double* p, reg v) { _mm512_storeu_pd(p, v); }
  static reg fma(reg a, reg b, reg c) { return _mm512_fmadd_pd(a, b, c); }
  static reg add(reg a, reg b) { return _mm512_add_pd(a, b); }
};

constexpr std::size_t kMr = 12;

#include "gemm_blocked.inl"

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  const __m512d a = _mm512_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(y + i, _mm512_fmadd_pd(a, _mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  __m512d s0 = _mm512_setzero_pd();
  __m512d s1 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), s0);
    s1 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i + 8), _mm512_loadu_pd(y + i + 8), s1);
  }
  double s = _mm512_reduce_add_pd(_mm512_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void add(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(out + i, _mm512_add_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void mul(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(out + i, _mm512_mul_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void relu(std::size_t n, const double* x, double* out) {
  const __m512d z = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d v = _mm512_loadu_pd(x + i);
    const __mmask8 pos = _mm512_cmp_pd_mask(v, z, _CMP_GT_OQ);
    _mm512_storeu_pd(out + i, _mm512_maskz_mov_pd(pos, v));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::size_t n, const double* x, const double* gout, double* gin) {
  const __m512d z = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __mmask8 pos = _mm512_cmp_pd_mask(_mm512_loadu_pd(x + i), z, _CMP_GT_OQ);
    const __m512d g = _mm512_maskz_mov_pd(pos, _mm512_loadu_pd(gout + i));
    _mm512_storeu_pd(gin + i, _mm512_add_pd(_mm512_loadu_pd(gin + i), g));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0) gin[i] += gout[i];
}

void adam(std::size_t n, double* param, const double* grad, double* m, double* v, double lr,
          double beta1, double beta2, double eps, double c1, double c2) {
  const __m512d b1 = _mm512_set1_pd(beta1), nb1 = _mm512_set1_pd(1.0 - beta1);
  const __m512d b2 = _mm512_set1_pd(beta2), nb2 = _mm512_set1_pd(1.0 - beta2);
  const __m512d vc1 = _mm512_set1_pd(c1), vc2 = _mm512_set1_pd(c2);
  const __m512d vlr = _mm512_set1_pd(lr), veps = _mm512_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d g = _mm512_loadu_pd(grad + i);
    const __m512d mi = _mm512_add_pd(_mm512_mul_pd(b1, _mm512_loadu_pd(m + i)), _mm512_mul_pd(nb1, g));
    const __m512d vi = _mm512_add_pd(_mm512_mul_pd(b2, _mm512_loadu_pd(v + i)),
                                     _mm512_mul_pd(_mm512_mul_pd(nb2, g), g));
    _mm512_storeu_pd(m + i, mi);
    _mm512_storeu_pd(v + i, vi);
    const __m512d denom = _mm512_add_pd(_mm512_sqrt_pd(_mm512_mul_pd(vi, vc2)), veps);
    const __m512d step = _mm512_div_pd(_mm512_mul_pd(vlr, _mm512_mul_pd(mi, vc1)), denom);
    _mm512_storeu_pd(param + i, _mm512_sub_pd(_mm512_loadu_pd(param + i), step));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    param[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace

const KernelTable table{Isa::avx512, gemm_blocked, axpy, dot, add, mul, relu, relu_backward, adam};

}  // namespace sigt::kernels::avx512

#else

namespace sigt::kernels::avx512 {
// Never selected off x86; dispatch checks supported() first.
const KernelTable table = scalar::table;
}  // namespace sigt::kernels::avx512

#endif
