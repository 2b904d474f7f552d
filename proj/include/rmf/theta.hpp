#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <string_view>

namespace rmf {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Fraction of a turn: x represents x / 2^128.
using Fixed128 = unsigned __int128;

double fixed_to_double(Fixed128 x);
// Distance to the nearest integer of a fractional part, still in fixed point
// (at most 2^127).
inline Fixed128 fixed_distance_to_integer(Fixed128 frac) {
  const Fixed128 neg = -frac;
  return frac < neg ? frac : neg;
}

// A real number held exactly enough for Diophantine work:
//   rational   p/q, exact;
//   quadratic  (a + b*sqrt(d))/c, exact (quotients are periodic);
//   decimal    a finite decimal string standing for an unknown real within
//              2^-precision_bits of it.
// Quadratic inputs whose surd is rational are normalized to rationals.
class Theta {
 public:
  enum class Kind { kRational, kQuadratic, kDecimal };

  static Theta rational(BigInt p, BigInt q);
  static Theta quadratic(BigInt a, BigInt b, BigInt c, BigInt d);
  static Theta decimal(std::string_view digits, unsigned precision_bits);

  // "rational:p/q", "quadratic:a,b,c,d" or "decimal:<digits>@<bits>".
  // Throws std::invalid_argument on malformed text.
  static Theta parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  std::string spec() const;
  double to_double() const;

  // floor(frac(theta) * 2^128), or its nearest available approximation.
  Fixed128 frac_fixed() const noexcept { return frac_; }
  // frac_fixed() is within 2^error_log2() of the true fractional part.
  int error_log2() const noexcept { return error_log2_; }

  // theta * m, same representation kind.
  Theta times(std::int64_t m) const;

  // Exact value for rational kind; the decimal's nominal value for decimal
  // kind. Not meaningful for quadratic kind.
  const BigRational& exact() const noexcept { return exact_; }
  // (a, b, c, d) for quadratic kind.
  const BigInt& qa() const noexcept { return a_; }
  const BigInt& qb() const noexcept { return b_; }
  const BigInt& qc() const noexcept { return c_; }
  const BigInt& qd() const noexcept { return d_; }
  unsigned precision_bits() const noexcept { return precision_bits_; }
  // Decimal digits as given (decimal kind only).
  const std::string& digits() const noexcept { return digits_; }

 private:
  Theta() = default;
  void compute_fixed();

  Kind kind_ = Kind::kRational;
  BigRational exact_;
  BigInt a_, b_, c_, d_;
  unsigned precision_bits_ = 0;
  std::string digits_;
  Fixed128 frac_ = 0;
  int error_log2_ = -128;
};

// floor(x) for rationals, rounding toward -infinity.
BigInt floor_div(const BigInt& num, const BigInt& den);

}  // namespace rmf
