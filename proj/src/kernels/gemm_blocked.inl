// Packed, cache-blocked GEMM driver shared by the SIMD variants.
//
// Included inside an anonymous namespace of a translation unit compiled for
// one ISA. The including file defines `Vec` with:
//   using reg; static constexpr std::size_t width;
//   zero(), set1(double), load(const double*), store(double*, reg),
//   fma(a, b, c) -> a * b + c, add(a, b)
// and the constant kMr (micro-tile rows). The micro-tile is kMr x 2*width.

constexpr std::size_t kNr = 2 * Vec::width;
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = kMr * 16;
constexpr std::size_t kNc = kNr * 128;

inline double load_elem(Trans t, const double* m, std::size_t ld, std::size_t row, std::size_t col) {
  return t == Trans::no ? m[row * ld + col] : m[col * ld + row];
}

// Packs op(A)[i0:i0+mc, p0:p0+kc] into kMr-row strips, zero padded.
void pack_a(Trans ta, const double* a, std::size_t lda, std::size_t i0, std::size_t mc,
            std::size_t p0, std::size_t kc, double* buf) {
  for (std::size_t ir = 0; ir < mc; ir += kMr) {
    const std::size_t rows = std::min(kMr, mc - ir);
    if (ta == Trans::no) {
      for (std::size_t p = 0; p < kc; ++p) {
        for (std::size_t r = 0; r < rows; ++r) buf[p * kMr + r] = a[(i0 + ir + r) * lda + p0 + p];
        for (std::size_t r = rows; r < kMr; ++r) buf[p * kMr + r] = 0.0;
      }
    } else {
      for (std::size_t p = 0; p < kc; ++p) {
        const double* src = a + (p0 + p) * lda + i0 + ir;
        for (std::size_t r = 0; r < rows; ++r) buf[p * kMr + r] = src[r];
        for (std::size_t r = rows; r < kMr; ++r) buf[p * kMr + r] = 0.0;
      }
    }
    buf += kc * kMr;
  }
}

// Packs op(B)[p0:p0+kc, j0:j0+nc] into kNr-column strips, zero padded.
void pack_b(Trans tb, const double* b, std::size_t ldb, std::size_t p0, std::size_t kc,
            std::size_t j0, std::size_t nc, double* buf) {
  for (std::size_t jr = 0; jr < nc; jr += kNr) {
    const std::size_t cols = std::min(kNr, nc - jr);
    if (tb == Trans::no) {
      for (std::size_t p = 0; p < kc; ++p) {
        const double* src = b + (p0 + p) * ldb + j0 + jr;
        for (std::size_t j = 0; j < cols; ++j) buf[p * kNr + j] = src[j];
        for (std::size_t j = cols; j < kNr; ++j) buf[p * kNr + j] = 0.0;
      }
    } else {
      for (std::size_t p = 0; p < kc; ++p) {
        for (std::size_t j = 0; j < cols; ++j) buf[p * kNr + j] = b[(j0 + jr + j) * ldb + p0 + p];
        for (std::size_t j = cols; j < kNr; ++j) buf[p * kNr + j] = 0.0;
      }
    }
    buf += kc * kNr;
  }
}

inline void micro_kernel(std::size_t kc, const double* ap, const double* bp, double* c,
                         std::size_t ldc, std::size_t rows, std::size_t cols) {
  typename Vec::reg acc0[kMr];
  typename Vec::reg acc1[kMr];
  for (std::size_t r = 0; r < kMr; ++r) {
    acc0[r] = Vec::zero();
    acc1[r] = Vec::zero();
  }
  for (std::size_t p = 0; p < kc; ++p) {
    const auto b0 = Vec::load(bp);
    const auto b1 = Vec::load(bp + Vec::width);
    for (std::size_t r = 0; r < kMr; ++r) {
      const auto av = Vec::set1(ap[r]);
      acc0[r] = Vec::fma(av, b0, acc0[r]);
      acc1[r] = Vec::fma(av, b1, acc1[r]);
    }
    ap += kMr;
    bp += kNr;
  }
  if (rows == kMr && cols == kNr) {
    for (std::size_t r = 0; r < kMr; ++r) {
      double* crow = c + r * ldc;
      Vec::store(crow, Vec::add(Vec::load(crow), acc0[r]));
      Vec::store(crow + Vec::width, Vec::add(Vec::load(crow + Vec::width), acc1[r]));
    }
    return;
  }
  alignas(64) double tile[kMr * kNr];
  for (std::size_t r = 0; r < kMr; ++r) {
    Vec::store(tile + r * kNr, acc0[r]);
    Vec::store(tile + r * kNr + Vec::width, acc1[r]);
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < cols; ++j) c[r * ldc + j] += tile[r * kNr + j];
}

struct PackBuffers {
  std::vector<double> a;
  std::vector<double> b;
};

PackBuffers& pack_buffers() {
  thread_local PackBuffers bufs;
  return bufs;
}

void gemm_blocked(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, const double* a,
                  std::size_t lda, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  if (m == 0 || n == 0 || k == 0) return;
  auto& bufs = pack_buffers();
  bufs.a.resize(kMc * kKc + kMr * kKc);
  bufs.b.resize(kNc * kKc + kNr * kKc);
  for (std::size_t jc = 0; jc < n; jc += kNc) {
    const std::size_t nc = std::min(kNc, n - jc);
    for (std::size_t pc = 0; pc < k; pc += kKc) {
      const std::size_t kc = std::min(kKc, k - pc);
      pack_b(tb, b, ldb, pc, kc, jc, nc, bufs.b.data());
      for (std::size_t ic = 0; ic < m; ic += kMc) {
        const std::size_t mc = std::min(kMc, m - ic);
        pack_a(ta, a, lda, ic, mc, pc, kc, bufs.a.data());
        for (std::size_t jr = 0; jr < nc; jr += kNr) {
          const std::size_t cols = std::min(kNr, nc - jr);
          const double* bp = bufs.b.data() + (jr / kNr) * kc * kNr;
          for (std::size_t ir = 0; ir < mc; ir += kMr) {
            const std::size_t rows = std::min(kMr, mc - ir);
            const double* ap = bufs.a.data() + (ir / kMr) * kc * kMr;
            micro_kernel(kc, ap, bp, c + (ic + ir) * ldc + jc + jr, ldc, rows, cols);
          }
        }
      }
    }
  }
}
