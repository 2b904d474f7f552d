#include "rmf/diophantine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmf {

namespace mp = boost::multiprecision;

namespace {

// Yields partial quotients one at a time.
class QuotientStream {
 public:
  explicit QuotientStream(const Theta& theta) : kind_(theta.kind()) {
    switch (kind_) {
      case Theta::Kind::kRational:
        num_ = mp::numerator(theta.exact());
        den_ = mp::denominator(theta.exact());
        break;
      case Theta::Kind::kQuadratic:
        init_quadratic(theta);
        break;
      case Theta::Kind::kDecimal: {
        const BigRational radius(BigInt(1), BigInt(1) << theta.precision_bits());
        const BigRational lo = theta.exact() - radius;
        const BigRational hi = theta.exact() + radius;
        num_ = mp::numerator(lo);
        den_ = mp::denominator(lo);
        num_hi_ = mp::numerator(hi);
        den_hi_ = mp::denominator(hi);
        break;
      }
    }
  }

  std::optional<BigInt> next() {
    if (done_) return std::nullopt;
    switch (kind_) {
      case Theta::Kind::kRational:
        return step_rational(num_, den_);
      case Theta::Kind::kQuadratic:
        return step_quadratic();
      case Theta::Kind::kDecimal: {
        const BigInt a_lo = floor_div(num_, den_);
        const BigInt a_hi = floor_div(num_hi_, den_hi_);
        if (a_lo != a_hi) {
          done_ = true;
          exhausted_ = true;
          return std::nullopt;
        }
        const BigInt r_lo = num_ - a_lo * den_;
        const BigInt r_hi = num_hi_ - a_hi * den_hi_;
        if (r_lo == 0 || r_hi == 0) {
          // The agreed quotient is sound; the following one is not.
          done_ = true;
          exhausted_ = true;
          return a_lo;
        }
        num_ = den_;
        den_ = r_lo;
        num_hi_ = den_hi_;
        den_hi_ = r_hi;
        return a_lo;
      }
    }
    return std::nullopt;
  }

  bool terminated() const { return done_ && !exhausted_; }
  bool exhausted() const { return exhausted_; }

 private:
  std::optional<BigInt> step_rational(BigInt& num, BigInt& den) {
    const BigInt a = floor_div(num, den);
    const BigInt r = num - a * den;
    if (r == 0) {
      done_ = true;
    } else {
      num = den;
      den = r;
    }
    return a;
  }

  // theta = (P + sqrt(D)) / Q with Q | (D - P^2).
  void init_quadratic(const Theta& theta) {
    D_ = theta.qb() * theta.qb() * theta.qd();
    if (theta.qb() > 0) {
      P_ = theta.qa();
      Q_ = theta.qc();
    } else {
      P_ = -theta.qa();
      Q_ = -theta.qc();
    }
    if ((D_ - P_ * P_) % Q_ != 0) {
      const BigInt abs_q = Q_ < 0 ? BigInt(-Q_) : Q_;
      P_ *= abs_q;
      D_ *= Q_ * Q_;
      Q_ *= abs_q;
    }
    root_ = mp::sqrt(D_);
  }

  BigInt step_quadratic() {
    // sqrt(D) is irrational, so floor((P + sqrt D)/Q) follows from
    // floor(sqrt D) with a +1 correction when Q < 0.
    const BigInt a = Q_ > 0 ? floor_div(P_ + root_, Q_)
                            : BigInt(-(floor_div(P_ + root_, -Q_) + 1));
    P_ = a * Q_ - P_;
    Q_ = (D_ - P_ * P_) / Q_;
    return a;
  }

  Theta::Kind kind_;
  BigInt num_, den_, num_hi_, den_hi_;
  BigInt P_, Q_, D_, root_;
  bool done_ = false;
  bool exhausted_ = false;
};

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("delta must lie in (0, 1/2)");
  }
}

// ||m theta|| for m >= 1.
double distance_unchecked(const Theta& theta, std::uint64_t m) {
  if (theta.kind() == Theta::Kind::kRational) {
    const BigInt& den = mp::denominator(theta.exact());
    BigInt r = (mp::numerator(theta.exact()) * BigInt(m)) % den;
    if (r < 0) r += den;
    const BigInt near = r < den - r ? r : BigInt(den - r);
    return BigRational(near, den).convert_to<double>();
  }
  return fixed_to_double(
      fixed_distance_to_integer(theta.frac_fixed() * Fixed128{m}));
}

}  // namespace

ContinuedFraction expand(const Theta& theta, std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("expansion depth must be >= 1");
  ContinuedFraction cf;
  QuotientStream stream(theta);
  BigInt p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  while (cf.quotients.size() < depth) {
    auto a = stream.next();
    if (!a) break;
    BigInt p = *a * p_prev + p_prev2;
    BigInt q = *a * q_prev + q_prev2;
    p_prev2 = std::exchange(p_prev, p);
    q_prev2 = std::exchange(q_prev, q);
    cf.quotients.push_back(std::move(*a));
    cf.convergents.push_back({std::move(p), std::move(q)});
    if (stream.terminated() || stream.exhausted()) break;
  }
  cf.terminated = stream.terminated();
  cf.precision_exhausted = stream.exhausted();
  return cf;
}

double distance_to_integer(const Theta& theta, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("q must be >= 1");
  return distance_unchecked(theta, q);
}

GrowthCheck check_growth_condition(const Theta& theta, double c,
                                   double exponent, std::uint64_t max_q) {
  if (!(c > 0.0)) throw std::invalid_argument("C must be positive");
  if (max_q == 0) throw std::invalid_argument("Q must be >= 1");
  GrowthCheck out;
  out.worst_scaled = std::numeric_limits<double>::infinity();
  for (std::uint64_t q = 1; q <= max_q; ++q) {
    const double d = distance_unchecked(theta, q);
    const double growth = std::pow(static_cast<double>(q), exponent);
    const double scaled = d * std::exp(growth);
    if (scaled < out.worst_scaled) {
      out.worst_scaled = scaled;
      out.worst_q = q;
      out.worst_distance = d;
    }
    if (!out.first_failure && d < c * std::exp(-growth)) out.first_failure = q;
  }
  out.passed = !out.first_failure.has_value();
  return out;
}

DirichletApprox dirichlet_approx(const Theta& alpha, std::uint64_t max_v) {
  if (max_v == 0) throw std::invalid_argument("Q must be >= 1");
  QuotientStream stream(alpha);
  BigInt p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  DirichletApprox best;
  const BigInt bound(max_v);
  while (true) {
    auto a = stream.next();
    if (!a) {
      best.certified = !stream.exhausted();
      break;
    }
    BigInt p = *a * p_prev + p_prev2;
    BigInt q = *a * q_prev + q_prev2;
    if (q > bound) break;
    best.u = p;
    best.v = static_cast<std::uint64_t>(q);
    p_prev2 = std::exchange(p_prev, p);
    q_prev2 = std::exchange(q_prev, q);
    if (stream.terminated()) break;
    if (stream.exhausted()) {
      best.certified = false;
      break;
    }
  }
  return best;
}

std::vector<std::int64_t> bad_set(const Theta& theta, std::uint64_t ell_max,
                                  std::uint64_t v_max, double delta) {
  check_delta(delta);
  if (v_max == 0) throw std::invalid_argument("v_max must be >= 1");
  constexpr auto kMax =
      static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  if (ell_max > kMax || (ell_max > 0 && v_max > kMax / ell_max)) {
    throw std::invalid_argument("ell_max * v_max exceeds 63 bits");
  }
  std::vector<std::int64_t> positive;
  for (std::uint64_t ell = 1; ell <= ell_max; ++ell) {
    for (std::uint64_t v = 1; v <= v_max; ++v) {
      if (distance_unchecked(theta, ell * v) <= delta) {
        positive.push_back(static_cast<std::int64_t>(ell));
        break;
      }
    }
  }
  std::vector<std::int64_t> out;
  out.reserve(2 * positive.size() + 1);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    out.push_back(-*it);
  }
  out.push_back(0);
  out.insert(out.end(), positive.begin(), positive.end());
  return out;
}

std::optional<std::uint64_t> min_gap(const std::vector<std::int64_t>& sorted) {
  if (sorted.size() < 2) return std::nullopt;
  std::uint64_t gap = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    gap = std::min(gap, static_cast<std::uint64_t>(sorted[i] - sorted[i - 1]));
  }
  return gap;
}

}  // namespace rmf
