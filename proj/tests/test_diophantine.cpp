#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rmf/diophantine.hpp"

using rmf::BigInt;
using rmf::BigRational;
using rmf::Theta;

namespace {

const Theta golden = Theta::quadratic(1, 1, 2, 5);
const Theta root2 = Theta::quadratic(0, 1, 1, 2);

std::vector<long> as_longs(const std::vector<BigInt>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.convert_to<long>());
  return out;
}

oracle::Float rational_float(const BigInt& p, const BigInt& q) {
  return oracle::Float(p) / oracle::Float(q);
}

}  // namespace

TEST_CASE("Theta parsing and normalization") {
  CHECK(Theta::parse("rational:3/7").spec() == "rational:3/7");
  CHECK(Theta::parse("rational:6/14").spec() == "rational:3/7");
  CHECK(Theta::parse("rational:-1/3").to_double() == doctest::Approx(-1.0 / 3));
  CHECK(Theta::parse("quadratic:1,1,2,5").kind() == Theta::Kind::kQuadratic);
  CHECK(Theta::parse("quadratic:1,1,2,5").to_double() ==
        doctest::Approx((1 + std::sqrt(5.0)) / 2));
  // A rational surd collapses to a rational.
  CHECK(Theta::parse("quadratic:1,2,3,9").spec() == "rational:7/3");
  const auto dec = Theta::parse("decimal:3.14159@40");
  CHECK(dec.kind() == Theta::Kind::kDecimal);
  CHECK(dec.precision_bits() == 40);
  CHECK(dec.spec() == "decimal:3.14159@40");
  for (const char* bad : {"3/7", "rational:3/0", "rational:x/2",
                          "quadratic:1,2,3", "quadratic:1,1,0,5",
                          "quadratic:1,1,1,-2", "decimal:3.14",
                          "decimal:3.14@0", "decimal:3.1a@20", "cubic:1"}) {
    CHECK_THROWS_AS(Theta::parse(bad), std::invalid_argument);
  }
}

TEST_CASE("frac_fixed agrees with a high-precision reference") {
  const struct {
    long a, b, c, d;
  } cases[] = {{1, 1, 2, 5}, {0, 1, 1, 2}, {3, -2, 7, 11}, {-5, 3, -4, 13}};
  for (const auto& k : cases) {
    const Theta t = Theta::quadratic(k.a, k.b, k.c, k.d);
    oracle::Float v = oracle::sqrt_value(k.a, k.b, k.c, k.d);
    v -= floor(v);
    const oracle::Float scaled = ldexp(v, 128);
    const oracle::Float err =
        abs(scaled - oracle::Float(BigInt(t.frac_fixed())));
    CHECK(err.convert_to<double>() < 4.0);
  }
}

TEST_CASE("expand examples") {
  const auto g = rmf::expand(golden, 8);
  CHECK(as_longs(g.quotients) == std::vector<long>(8, 1));
  const long p[] = {1, 2, 3, 5, 8}, q[] = {1, 1, 2, 3, 5};
  for (int k = 0; k < 5; ++k) {
    CHECK(g.convergents[k].p == p[k]);
    CHECK(g.convergents[k].q == q[k]);
  }
  CHECK_FALSE(g.terminated);

  CHECK(as_longs(rmf::expand(root2, 6).quotients) ==
        std::vector<long>{1, 2, 2, 2, 2, 2});

  const auto r = rmf::expand(Theta::rational(3, 7), 10);
  CHECK(as_longs(r.quotients) == std::vector<long>{0, 2, 3});
  CHECK(r.convergents.back().p == 3);
  CHECK(r.convergents.back().q == 7);
  CHECK(r.terminated);

  const auto neg = rmf::expand(Theta::rational(-7, 3), 10);
  CHECK(as_longs(neg.quotients) == std::vector<long>{-3, 1, 2});

  const auto pi = rmf::expand(Theta::parse("decimal:3.14159265358979323846@60"), 40);
  CHECK(as_longs(std::vector<BigInt>(pi.quotients.begin(), pi.quotients.begin() + 5)) ==
        std::vector<long>{3, 7, 15, 1, 292});
  CHECK(pi.precision_exhausted);
  CHECK(pi.quotients.size() < 40);

  CHECK_THROWS_AS(rmf::expand(golden, 0), std::invalid_argument);
}

TEST_CASE("convergent invariants") {
  for (const char* spec : {"quadratic:1,1,2,5", "quadratic:0,1,1,2",
                           "quadratic:3,-2,7,11", "quadratic:1,1,1,31",
                           "rational:355/113"}) {
    const Theta t = Theta::parse(spec);
    const auto cf = rmf::expand(t, 25);
    const oracle::Float value =
        t.kind() == Theta::Kind::kRational
            ? rational_float(boost::multiprecision::numerator(t.exact()),
                             boost::multiprecision::denominator(t.exact()))
            : oracle::sqrt_value(t.qa().convert_to<long>(),
                                 t.qb().convert_to<long>(),
                                 t.qc().convert_to<long>(),
                                 t.qd().convert_to<long>());
    for (std::size_t k = 0; k < cf.convergents.size(); ++k) {
      const auto& c = cf.convergents[k];
      if (k >= 2) {
        CHECK(c.p == cf.quotients[k] * cf.convergents[k - 1].p + cf.convergents[k - 2].p);
        CHECK(c.q == cf.quotients[k] * cf.convergents[k - 1].q + cf.convergents[k - 2].q);
      }
      if (k >= 2) CHECK(c.q > cf.convergents[k - 1].q);
      if (k + 1 < cf.convergents.size()) {
        const auto& next = cf.convergents[k + 1];
        const oracle::Float err = abs(value - rational_float(c.p, c.q));
        CHECK(err < oracle::Float(1) / (oracle::Float(c.q) * oracle::Float(next.q)));
        // Best approximation for every q below the next denominator.
        if (next.q <= 20'000) {
          const double dk = rmf::distance_to_integer(t, c.q.convert_to<std::uint64_t>());
          const auto stop = next.q.convert_to<std::uint64_t>();
          for (std::uint64_t m = 1; m < stop; ++m) {
            REQUIRE(rmf::distance_to_integer(t, m) >= dk);
          }
        }
      }
    }
  }
}

TEST_CASE("distance_to_integer examples") {
  const Theta half = Theta::rational(1, 2);
  for (std::uint64_t q = 2; q <= 20; q += 2) {
    CHECK(rmf::distance_to_integer(half, q) == 0.0);
  }
  CHECK(rmf::distance_to_integer(half, 3) == 0.5);
  CHECK(rmf::distance_to_integer(root2, 1) ==
        doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-15));
  CHECK(rmf::distance_to_integer(golden, 5) ==
        doctest::Approx(0.0901699437494742).epsilon(1e-14));
  CHECK(rmf::distance_to_integer(Theta::rational(1, 3), 3) == 0.0);
  CHECK_THROWS_AS(rmf::distance_to_integer(golden, 0), std::invalid_argument);
}

TEST_CASE("fixed-point path agrees with the continued-fraction path") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<long> coef(-9, 9), denom(1, 9), rad(2, 60);
  std::uniform_int_distribution<std::uint64_t> qd(1, 1'000'000);
  int checked = 0;
  while (checked < 100) {
    const long b = coef(rng);
    const long d = rad(rng);
    const long r = static_cast<long>(std::sqrt(static_cast<double>(d)));
    if (b == 0 || r * r == d) continue;
    const Theta t = Theta::quadratic(coef(rng), b, denom(rng), d);
    // A convergent p/q_k with q_k >= 2^70 approximates theta within 2^-140.
    const auto cf = rmf::expand(t, 400);
    const rmf::Convergent* far = nullptr;
    for (const auto& c : cf.convergents) {
      if (c.q >= (BigInt(1) << 70)) {
        far = &c;
        break;
      }
    }
    REQUIRE(far != nullptr);
    const std::uint64_t q = qd(rng);
    BigInt num = (far->p * q) % far->q;
    if (num < 0) num += far->q;
    const BigInt near = num < far->q - num ? num : BigInt(far->q - num);
    const double cf_path = BigRational(near, far->q).convert_to<double>();
    CHECK(std::fabs(rmf::distance_to_integer(t, q) - cf_path) < std::ldexp(1.0, -50));
    ++checked;
  }
}

TEST_CASE("check_growth_condition") {
  // Scan reference for the golden ratio at C = 0.2, exponent 1/50.
  const oracle::Float phi = oracle::sqrt_value(1, 1, 2, 5);
  std::uint64_t first_fail = 0, worst_q = 0;
  double worst = INFINITY;
  for (std::uint64_t q = 1; q <= 10'000; ++q) {
    const double d = oracle::distance(phi * q);
    const double g = std::pow(static_cast<double>(q), 0.02);
    if (!first_fail && d < 0.2 * std::exp(-g)) first_fail = q;
    if (d * std::exp(g) < worst) {
      worst = d * std::exp(g);
      worst_q = q;
    }
  }
  const auto g = rmf::check_growth_condition(golden, 0.2, 0.02, 10'000);
  CHECK(g.worst_q == worst_q);
  CHECK(g.worst_scaled == doctest::Approx(worst).epsilon(1e-12));
  REQUIRE(g.first_failure.has_value());
  CHECK(*g.first_failure == first_fail);
  CHECK(first_fail == 8);
  CHECK_FALSE(g.passed);

  // Passing example: small C over a short range.
  const auto ok = rmf::check_growth_condition(golden, 0.01, 0.02, 20);
  CHECK(ok.passed);
  CHECK_FALSE(ok.first_failure.has_value());

  const auto third = rmf::check_growth_condition(Theta::rational(1, 3), 1e-9, 0.02, 100);
  CHECK_FALSE(third.passed);
  CHECK(*third.first_failure == 3);
  CHECK(third.worst_q == 3);
  CHECK(third.worst_distance == 0.0);

  // sum_{k<=6} 10^{-k!} as an exact rational.
  BigInt den = boost::multiprecision::pow(BigInt(10), 720);
  BigInt num = 0;
  for (unsigned f : {1u, 2u, 6u, 24u, 120u, 720u}) {
    num += den / boost::multiprecision::pow(BigInt(10), f);
  }
  const auto liouville = rmf::check_growth_condition(Theta::rational(num, den), 0.2,
                                                     0.02, 720);
  CHECK_FALSE(liouville.passed);
  CHECK(*liouville.first_failure <= 720);

  CHECK_THROWS_AS(rmf::check_growth_condition(golden, 0.0, 0.02, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(rmf::check_growth_condition(golden, 0.2, 0.02, 0),
                  std::invalid_argument);
}

TEST_CASE("dirichlet_approx") {
  const auto half = rmf::dirichlet_approx(Theta::rational(1, 2), 10);
  CHECK(half.u == 1);
  CHECK(half.v == 2);
  const auto r2 = rmf::dirichlet_approx(root2, 10);
  CHECK(r2.u == 7);
  CHECK(r2.v == 5);
  CHECK(r2.certified);

  const oracle::Float s2 = oracle::sqrt_value(0, 1, 1, 2);
  for (std::uint64_t max_v : {1ull, 2ull, 7ull, 100ull, 12345ull, 1'000'000ull}) {
    for (const Theta* t : {&golden, &root2}) {
      const auto a = rmf::dirichlet_approx(*t, max_v);
      CHECK(a.v >= 1);
      CHECK(a.v <= max_v);
      CHECK(boost::multiprecision::gcd(a.u, BigInt(a.v)) == 1);
      const oracle::Float value = t == &root2 ? s2 : oracle::sqrt_value(1, 1, 2, 5);
      const oracle::Float err = abs(value - rational_float(a.u, BigInt(a.v)));
      CHECK(err <= oracle::Float(1) / (oracle::Float(a.v) * oracle::Float(max_v)));
    }
  }
  CHECK_THROWS_AS(rmf::dirichlet_approx(root2, 0), std::invalid_argument);
}

TEST_CASE("bad_set") {
  CHECK(rmf::bad_set(root2, 10, 3, 0.05) ==
        std::vector<std::int64_t>{-6, -4, 0, 4, 6});
  CHECK(rmf::bad_set(golden, 0, 5, 0.1) == std::vector<std::int64_t>{0});
  CHECK(rmf::min_gap({-6, -4, 0, 4, 6}) == 2u);
  CHECK_FALSE(rmf::min_gap({0}).has_value());
  CHECK_THROWS_AS(rmf::bad_set(root2, 10, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rmf::bad_set(root2, 10, 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rmf::bad_set(root2, 10, 0, 0.1), std::invalid_argument);

  const struct {
    long a, b, c, d;
    std::int64_t ell, v;
    double delta;
  } cases[] = {{0, 1, 1, 2, 60, 20, 0.01},
               {1, 1, 2, 5, 100, 8, 0.02},
               {3, -2, 7, 11, 40, 30, 0.003},
               {0, 1, 1, 3, 200, 3, 0.05}};
  for (const auto& k : cases) {
    const auto fast =
        rmf::bad_set(Theta::quadratic(k.a, k.b, k.c, k.d), k.ell, k.v, k.delta);
    CHECK(fast == oracle::bad_set(oracle::sqrt_value(k.a, k.b, k.c, k.d), k.ell,
                                  k.v, k.delta));
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i] == -fast[fast.size() - 1 - i]);
    }
  }
}
