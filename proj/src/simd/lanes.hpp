#pragma once

// Shared scalar pieces of the lane-compensated kernels. Both the reference
// and the vector variants run their tails and final reductions through
// these so the rounding sequence is identical.

#include <cmath>
#include <cstddef>

namespace rmf::simd::detail {

inline constexpr std::size_t kLanes = 4;

// Neumaier step on one lane.
inline void compensated_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  const bool sum_is_big = std::fabs(sum) >= std::fabs(x);
  const double big = sum_is_big ? sum : x;
  const double small = sum_is_big ? x : sum;
  comp += (big - t) + small;
  sum = t;
}

struct LaneAccumulator {
  double sum[kLanes] = {0.0, 0.0, 0.0, 0.0};
  double comp[kLanes] = {0.0, 0.0, 0.0, 0.0};

  void add(std::size_t i, double x) {
    compensated_add(sum[i % kLanes], comp[i % kLanes], x);
  }

  double reduce() const {
    const double s = (sum[0] + sum[1]) + (sum[2] + sum[3]);
    const double c = (comp[0] + comp[1]) + (comp[2] + comp[3]);
    return s + c;
  }
};

}  // namespace rmf::simd::detail
