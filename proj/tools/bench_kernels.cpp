// Times the GEMM variants on the shapes that dominate receiver training.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "sigt/kernels/kernels.hpp"

using namespace sigt::kernels;

int main() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t shapes[][3] = {{1024, 512, 512}, {1024, 1024, 512}, {512, 512, 1024}, {64, 2048, 1024}};
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::avx512}) {
    if (!supported(isa)) continue;
    for (const auto& s : shapes) {
      const std::size_t m = s[0], n = s[1], k = s[2];
      std::vector<double> a(m * k), b(k * n), c(m * n, 0.0);
      for (double& x : a) x = u(rng);
      for (double& x : b) x = u(rng);
      for (Trans tb : {Trans::no, Trans::yes}) {
        const int reps = isa == Isa::scalar ? 1 : 5;
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r)
          table(isa).gemm(Trans::no, tb, m, n, k, a.data(), k, b.data(), tb == Trans::no ? n : k, c.data(), n);
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-7s %5zux%5zux%5zu tb=%d  %6.2f GFLOP/s\n", std::string(isa_name(isa)).c_str(), m, n, k,
                    tb == Trans::yes, 2.0 * m * n * k * reps / sec * 1e-9);
      }
    }
  }
}
