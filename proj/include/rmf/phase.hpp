#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace rmf {

// e^{2 pi i x / 2^64}. The top two bits pick the quadrant, so quarter turns
// come out exact (e.g. a phase of 2^63 gives exactly -1).
inline std::complex<double> unit_phase(std::uint64_t x) {
  const unsigned quadrant = static_cast<unsigned>(x >> 62);
  const std::uint64_t rest = x & ((std::uint64_t{1} << 62) - 1);
  const double angle = static_cast<double>(rest >> 9) * 0x1.0p-53 *
                       (std::numbers::pi / 2);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  switch (quadrant) {
    case 0:
      return {c, s};
    case 1:
      return {-s, c};
    case 2:
      return {-c, -s};
    default:
      return {s, -c};
  }
}

}  // namespace rmf
