#include "kernels_impl.hpp"
#include "lanes.hpp"

namespace rmf::simd::detail {

void multiply_row_scalar(std::uint32_t x, const std::uint32_t* ys,
                         std::size_t n, std::uint64_t* out) {
  const std::uint64_t wide = x;
  for (std::size_t i = 0; i < n; ++i) out[i] = wide * ys[i];
}

ComplexSum weighted_sum_scalar(const double* w_re, const double* w_im,
                               const double* f_re, const double* f_im,
                               std::size_t n) {
  LaneAccumulator re, im;
  for (std::size_t i = 0; i < n; ++i) {
    re.add(i, w_re[i] * f_re[i] - w_im[i] * f_im[i]);
    im.add(i, w_re[i] * f_im[i] + w_im[i] * f_re[i]);
  }
  return {re.reduce(), im.reduce()};
}

PowerSums power_sums_scalar(const double* re, const double* im,
                            std::size_t n) {
  LaneAccumulator a2, a4, sr, si;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = re[i] * re[i] + im[i] * im[i];
    const double t = re[i] * im[i];
    a2.add(i, m);
    a4.add(i, m * m);
    sr.add(i, re[i] * re[i] - im[i] * im[i]);
    si.add(i, t + t);
  }
  return {a2.reduce(), a4.reduce(), sr.reduce(), si.reduce()};
}

}  // namespace rmf::simd::detail
