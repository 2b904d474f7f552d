#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace rmf::simd {

namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, detail::multiply_row_scalar,
                                   detail::weighted_sum_scalar,
                                   detail::power_sums_scalar};
#if defined(RMF_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2Table{Isa::kAvx2, detail::multiply_row_avx2,
                                 detail::weighted_sum_avx2,
                                 detail::power_sums_avx2};
#endif

Isa detect_best() {
  if (const char* env = std::getenv("RMF_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::kScalar;
    if (want == "avx2" && isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  }
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(RMF_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("SIMD variant not supported on this CPU: " +
                                std::string(isa_name(isa)));
  }
#if defined(RMF_HAVE_AVX2_KERNELS)
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& kernels() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &kernels_for(detect_best());
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

Isa active_isa() { return kernels().isa; }

void force_isa(Isa isa) {
  g_active.store(&kernels_for(isa), std::memory_order_release);
}

void reset_isa() { g_active.store(nullptr, std::memory_order_release); }

}  // namespace rmf::simd
