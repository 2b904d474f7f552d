#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant chosen at runtime. Floating-point kernels accumulate in four
// interleaved compensated lanes (element i goes to lane i % 4) and reduce
// the lanes in a fixed order, so every variant returns bitwise-identical
// results to the scalar reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace rmf::simd {

enum class Isa { kScalar, kAvx2 };

struct ComplexSum {
  double re = 0.0;
  double im = 0.0;
};

// Sums over z of |z|^2, |z|^4, Re(z^2), Im(z^2).
struct PowerSums {
  double abs2 = 0.0;
  double abs4 = 0.0;
  double sq_re = 0.0;
  double sq_im = 0.0;
};

struct KernelTable {
  Isa isa;
  // out[i] = x * ys[i], exact in 64 bits.
  void (*multiply_row)(std::uint32_t x, const std::uint32_t* ys, std::size_t n,
                       std::uint64_t* out);
  // Compensated sum of w[i] * f[i] over complex numbers in split layout.
  ComplexSum (*weighted_sum)(const double* w_re, const double* w_im,
                             const double* f_re, const double* f_im,
                             std::size_t n);
  PowerSums (*power_sums)(const double* re, const double* im, std::size_t n);
};

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// Best supported ISA unless overridden by force_isa() or RMF_SIMD=scalar|avx2.
Isa active_isa();
// Throws std::invalid_argument if the CPU lacks the ISA.
void force_isa(Isa isa);
void reset_isa();

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

inline void multiply_row(std::uint32_t x, std::span<const std::uint32_t> ys,
                         std::span<std::uint64_t> out) {
  kernels().multiply_row(x, ys.data(), ys.size(), out.data());
}

inline ComplexSum weighted_sum(std::span<const double> w_re,
                               std::span<const double> w_im,
                               std::span<const double> f_re,
                               std::span<const double> f_im) {
  return kernels().weighted_sum(w_re.data(), w_im.data(), f_re.data(),
                                f_im.data(), f_re.size());
}

inline PowerSums power_sums(std::span<const double> re,
                            std::span<const double> im) {
  return kernels().power_sums(re.data(), im.data(), re.size());
}

}  // namespace rmf::simd
