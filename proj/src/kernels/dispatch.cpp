#include "sigt/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sigt::kernels {
namespace {

const KernelTable* initial_table() {
  Isa isa = detect_best();
  if (const char* env = std::getenv("SIGT_KERNELS")) {
    const std::string want = env;
    if (want == "scalar") {
      isa = Isa::scalar;
    } else if (want == "avx2" && supported(Isa::avx2)) {
      isa = Isa::avx2;
    } else if (want == "avx512" && supported(Isa::avx512)) {
      isa = Isa::avx512;
    }
  }
  return &table(isa);
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::avx512:
      return "avx512";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::avx512:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_best() {
  if (supported(Isa::avx512)) return Isa::avx512;
  if (supported(Isa::avx2)) return Isa::avx2;
  return Isa::scalar;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa))
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) +
                                "' is not supported on this CPU");
  switch (isa) {
    case Isa::avx2:
      return avx2::table;
    case Isa::avx512:
      return avx512::table;
    case Isa::scalar:
      break;
  }
  return scalar::table;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) { active_slot().store(&table(isa), std::memory_order_relaxed); }

}  // namespace sigt::kernels
