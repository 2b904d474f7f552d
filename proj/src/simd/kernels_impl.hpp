#pragma once

#include "rmf/simd/kernels.hpp"

namespace rmf::simd::detail {

void multiply_row_scalar(std::uint32_t x, const std::uint32_t* ys,
                         std::size_t n, std::uint64_t* out);
ComplexSum weighted_sum_scalar(const double* w_re, const double* w_im,
                               const double* f_re, const double* f_im,
                               std::size_t n);
PowerSums power_sums_scalar(const double* re, const double* im, std::size_t n);

#if defined(RMF_HAVE_AVX2_KERNELS)
void multiply_row_avx2(std::uint32_t x, const std::uint32_t* ys, std::size_t n,
                       std::uint64_t* out);
ComplexSum weighted_sum_avx2(const double* w_re, const double* w_im,
                             const double* f_re, const double* f_im,
                             std::size_t n);
PowerSums power_sums_avx2(const double* re, const double* im, std::size_t n);
#endif

}  // namespace rmf::simd::detail
