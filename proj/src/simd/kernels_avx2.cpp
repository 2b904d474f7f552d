#include <immintrin.h>

#include "kernels_impl.hpp"
#include "lanes.hpp"

namespace rmf::simd::detail {

namespace {

// Vector form of compensated_add(): four lanes at once, same operations.
struct VecAccumulator {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d abs_mask = _mm256_castsi256_pd(
        _mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d t = _mm256_add_pd(sum, x);
    const __m256d sum_is_big =
        _mm256_cmp_pd(_mm256_and_pd(sum, abs_mask), _mm256_and_pd(x, abs_mask),
                      _CMP_GE_OQ);
    const __m256d big = _mm256_blendv_pd(x, sum, sum_is_big);
    const __m256d small = _mm256_blendv_pd(sum, x, sum_is_big);
    comp = _mm256_add_pd(comp, _mm256_add_pd(_mm256_sub_pd(big, t), small));
    sum = t;
  }

  LaneAccumulator spill() const {
    LaneAccumulator acc;
    _mm256_storeu_pd(acc.sum, sum);
    _mm256_storeu_pd(acc.comp, comp);
    return acc;
  }
};

}  // namespace

void multiply_row_avx2(std::uint32_t x, const std::uint32_t* ys, std::size_t n,
                       std::uint64_t* out) {
  const __m256i wide = _mm256_set1_epi64x(static_cast<long long>(x));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i lo =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(ys + i));
    const __m128i hi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(ys + i + 4));
    const __m256i plo = _mm256_mul_epu32(_mm256_cvtepu32_epi64(lo), wide);
    const __m256i phi = _mm256_mul_epu32(_mm256_cvtepu32_epi64(hi), wide);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), plo);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i + 4), phi);
  }
  for (; i < n; ++i) out[i] = std::uint64_t{x} * ys[i];
}

ComplexSum weighted_sum_avx2(const double* w_re, const double* w_im,
                             const double* f_re, const double* f_im,
                             std::size_t n) {
  VecAccumulator vre, vim;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d wr = _mm256_loadu_pd(w_re + i);
    const __m256d wi = _mm256_loadu_pd(w_im + i);
    const __m256d fr = _mm256_loadu_pd(f_re + i);
    const __m256d fi = _mm256_loadu_pd(f_im + i);
    vre.add(_mm256_sub_pd(_mm256_mul_pd(wr, fr), _mm256_mul_pd(wi, fi)));
    vim.add(_mm256_add_pd(_mm256_mul_pd(wr, fi), _mm256_mul_pd(wi, fr)));
  }
  LaneAccumulator re = vre.spill(), im = vim.spill();
  for (; i < n; ++i) {
    re.add(i, w_re[i] * f_re[i] - w_im[i] * f_im[i]);
    im.add(i, w_re[i] * f_im[i] + w_im[i] * f_re[i]);
  }
  return {re.reduce(), im.reduce()};
}

PowerSums power_sums_avx2(const double* re, const double* im, std::size_t n) {
  VecAccumulator va2, va4, vsr, vsi;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    const __m256d rr = _mm256_mul_pd(r, r);
    const __m256d mm = _mm256_mul_pd(m, m);
    const __m256d abs2 = _mm256_add_pd(rr, mm);
    const __m256d t = _mm256_mul_pd(r, m);
    va2.add(abs2);
    va4.add(_mm256_mul_pd(abs2, abs2));
    vsr.add(_mm256_sub_pd(rr, mm));
    vsi.add(_mm256_add_pd(t, t));
  }
  LaneAccumulator a2 = va2.spill(), a4 = va4.spill(), sr = vsr.spill(),
                  si = vsi.spill();
  for (; i < n; ++i) {
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
