#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rmf/theta.hpp"

namespace rmf {

struct Convergent {
  BigInt p;
  BigInt q;
};

struct ContinuedFraction {
  std::vector<BigInt> quotients;       // a0; a1, a2, ...
  std::vector<Convergent> convergents;  // p_k / q_k, one per quotient
  bool terminated = false;  // exact rational input fully expanded
  bool precision_exhausted = false;  // decimal input: next quotient uncertain
};

// Expands theta to at most `depth` quotients. Rational inputs stop at their
// last quotient; quadratic inputs are expanded exactly; decimal inputs stop
// once the two ends of the uncertainty interval disagree on a quotient.
ContinuedFraction expand(const Theta& theta, std::size_t depth);

// ||q theta|| in [0, 1/2]. Exact for rational theta; otherwise via 128-bit
// fixed point (error below 2^-60 for q < 2^60). Throws
// std::invalid_argument for q = 0.
double distance_to_integer(const Theta& theta, std::uint64_t q);

struct GrowthCheck {
  bool passed = false;
  // q minimizing ||q theta|| exp(q^exponent); ties go to the smaller q.
  std::uint64_t worst_q = 0;
  double worst_distance = 0.0;
  double worst_scaled = 0.0;  // ||worst_q theta|| exp(worst_q^exponent)
  std::optional<std::uint64_t> first_failure;
};

// Scans q = 1..max_q for ||q theta|| >= c * exp(-q^exponent).
GrowthCheck check_growth_condition(const Theta& theta, double c,
                                   double exponent, std::uint64_t max_q);

struct DirichletApprox {
  BigInt u;
  std::uint64_t v = 0;
  // False only for decimal inputs whose precision ran out before a
  // denominator above max_v was reached.
  bool certified = true;
};

// Coprime u/v with v <= max_v and |alpha - u/v| <= 1/(v max_v), taken from
// the last convergent with denominator <= max_v.
DirichletApprox dirichlet_approx(const Theta& alpha, std::uint64_t max_v);

// All l with |l| <= ell_max and min_{1<=v<=v_max} ||v l theta|| <= delta,
// sorted ascending. Always contains 0 and is symmetric under negation.
std::vector<std::int64_t> bad_set(const Theta& theta, std::uint64_t ell_max,
                                  std::uint64_t v_max, double delta);

// Smallest gap between consecutive elements; nullopt for fewer than two.
std::optional<std::uint64_t> min_gap(const std::vector<std::int64_t>& sorted);

}  // namespace rmf
