#pragma once

// Dense double-precision inner loops used by the tensor library.
//
// Every kernel has a scalar reference implementation and optional AVX2 and
// AVX-512 variants. The variant is chosen once at startup from CPUID and can
// be pinned with the SIGT_KERNELS environment variable
// (scalar | avx2 | avx512 | auto). All variants are tested for equivalence
// against the scalar reference.

#include <cstddef>
#include <string_view>

namespace sigt::kernels {

enum class Isa { scalar, avx2, avx512 };

std::string_view isa_name(Isa isa);

enum class Trans { no, yes };

struct KernelTable {
  Isa isa;

  // C(m x n) += op(A)(m x k) * op(B)(k x n), all row-major.
  // op(A)(i, p) = A[i * lda + p] for Trans::no, A[p * lda + i] for Trans::yes.
  void (*gemm)(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k,
               const double* a, std::size_t lda, const double* b, std::size_t ldb,
               double* c, std::size_t ldc);

  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  double (*dot)(std::size_t n, const double* x, const double* y);
  // out = x + y, out = x * y (out may alias x or y)
  void (*add)(std::size_t n, const double* x, const double* y, double* out);
  void (*mul)(std::size_t n, const double* x, const double* y, double* out);
  // out = max(x, 0)
  void (*relu)(std::size_t n, const double* x, double* out);
  // gin += gout where x > 0
  void (*relu_backward)(std::size_t n, const double* x, const double* gout, double* gin);
  // Bias-corrected Adam update over a contiguous parameter block.
  // m, v are updated in place; c1 = 1/(1-beta1^t), c2 = 1/(1-beta2^t).
  void (*adam)(std::size_t n, double* param, const double* grad, double* m, double* v,
               double lr, double beta1, double beta2, double eps, double c1, double c2);
};

// True when the running CPU can execute the given variant.
bool supported(Isa isa);

// Kernel table for a specific ISA. Throws std::invalid_argument when the CPU
// cannot run it.
const KernelTable& table(Isa isa);

// The table selected for this process.
const KernelTable& active();

// Best ISA available on this CPU, ignoring SIGT_KERNELS.
Isa detect_best();

// Override the active table (tests and benchmarks).
void set_active(Isa isa);

namespace scalar {
extern const KernelTable table;
}
namespace avx2 {
extern const KernelTable table;
}
namespace avx512 {
extern const KernelTable table;
}

}  // namespace sigt::kernels
