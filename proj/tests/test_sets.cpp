#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rmf/errors.hpp"
#include "rmf/sets.hpp"

using rmf::WeightedSet;
using Support = std::vector<std::uint64_t>;

namespace {

const rmf::SieveTable& table() {
  static const rmf::SieveTable t(1'020'000);
  return t;
}

Support elems(const WeightedSet& s) { return oracle::support(s); }

WeightedSet ind(Support s) { return WeightedSet::indicator(std::move(s), "t"); }

}  // namespace

TEST_CASE("interval_set") {
  CHECK(elems(rmf::interval_set(table(), 10, 5)) ==
        Support{10, 11, 12, 13, 14, 15});
  CHECK(elems(rmf::interval_set(table(), 1, 0)) == Support{1});
  CHECK(rmf::interval_set(table(), 100, 100).size() == 101);
  CHECK_THROWS_AS(rmf::interval_set(table(), 0, 5), rmf::PreconditionError);
  CHECK_THROWS_AS(rmf::interval_set(table(), 1'019'990, 20), rmf::RangeError);
  CHECK_THROWS_AS(rmf::interval_set(table(), UINT64_MAX - 1, 5),
                  rmf::RangeError);
  const auto s = rmf::interval_set(table(), 100, 100);
  CHECK(s.is_indicator());
  CHECK(s.variance() == 101.0);
}

TEST_CASE("shifted_primes_set") {
  CHECK(elems(rmf::shifted_primes_set(table(), 10, 1)) == Support{3, 4, 6, 8});
  const auto minus = rmf::shifted_primes_set(table(), 10, -1);
  CHECK(elems(minus) == Support{2, 4, 6, 10});
  CHECK(minus.label().find("dropped=1") != std::string::npos);
  CHECK(rmf::shifted_primes_set(table(), 3, 5).empty());
  CHECK_THROWS_AS(rmf::shifted_primes_set(table(), 10, 0),
                  rmf::PreconditionError);
}

TEST_CASE("two_squares_set") {
  CHECK(elems(rmf::two_squares_set(table(), 1, 9)) ==
        Support{1, 2, 4, 5, 8, 9, 10});
  CHECK(rmf::two_squares_set(table(), 3, 0).empty());
  const auto s = rmf::two_squares_set(table(), 1, 9999);
  Support ref;
  for (std::uint64_t n = 1; n <= 10'000; ++n) {
    if (oracle::two_squares_search(n)) ref.push_back(n);
  }
  CHECK(elems(s) == ref);
}

TEST_CASE("typical_filter") {
  CHECK(elems(rmf::typical_filter(table(), ind({8, 11, 16}), 3)) ==
        Support{8, 11});
  CHECK(rmf::typical_filter(table(), ind({2, 3, 5, 30}), 0).empty());
  CHECK(elems(rmf::typical_filter(table(), ind({2, 3, 4, 6}), 2)) ==
        Support{2, 3, 4, 6});
  CHECK(elems(rmf::typical_filter(table(), ind({1, 2}), 5)) == Support{2});
}

TEST_CASE("two_squares_typical_filter") {
  CHECK(elems(rmf::two_squares_typical_filter(table(), ind({2}), 0.5, 3, 3)) ==
        Support{2});
  CHECK(rmf::two_squares_typical_filter(table(), ind({64 * 3}), 0.1, 3, 3)
            .empty());
  CHECK_THROWS_AS(rmf::two_squares_typical_filter(table(), ind({2}), 0.1, 3, 2),
                  rmf::PreconditionError);
  CHECK_THROWS_AS(rmf::two_squares_typical_filter(table(), ind({2}), 0.1, 0, 2),
                  rmf::PreconditionError);
}

TEST_CASE("two_squares_typical_filter at x = 10^6, y = 10^4") {
  const double x = 1e6, y = 1e4;
  const auto [k_min, k_max] = rmf::double_exponential_range(x / y, x);
  CHECK(k_min == 2);
  CHECK(k_max == 2);
  const auto a = rmf::two_squares_set(table(), 1'000'000, 10'000);
  const auto s = rmf::two_squares_typical_filter(table(), a, 0.1, k_min, k_max);

  // Omega(n; e^{e^2}) <= 1.2 counted by trial division.
  const double t = std::exp(std::exp(2.0));
  std::size_t kept = 0;
  for (const std::uint64_t n : a.support()) {
    unsigned omega = 0;
    for (const auto& [p, e] : oracle::trial_division(n)) {
      if (static_cast<double>(p) <= t) omega += e;
    }
    kept += omega <= 1.2;
  }
  CHECK(a.size() == 2089);
  CHECK(s.size() == kept);
  CHECK(kept == 879);
}

TEST_CASE("double_exponential_range rounds inward") {
  CHECK(rmf::double_exponential_range(16.0, 1e6) == std::pair{2, 2});
  CHECK(rmf::double_exponential_range(1.0, 1e9) == std::pair{1, 3});
  const auto empty = rmf::double_exponential_range(2000.0, 3000.0);
  CHECK(empty.first > empty.second);
}

TEST_CASE("squarefree_filter") {
  CHECK(elems(rmf::squarefree_filter(table(), ind({2, 3, 4, 6}))) ==
        Support{2, 3, 6});
  CHECK(rmf::squarefree_filter(table(), ind({4, 8, 9})).empty());
  CHECK(elems(rmf::squarefree_filter(table(), ind({1}))) == Support{1});
}

TEST_CASE("random_thin") {
  const auto four = ind({2, 3, 5, 7});
  const auto half = rmf::random_thin(four, 0.5, 42);
  CHECK(half.size() == 2);
  CHECK(half == rmf::random_thin(four, 0.5, 42));
  CHECK(elems(rmf::random_thin(four, 1.0, 42)) == elems(four));
  CHECK_THROWS_AS(rmf::random_thin(four, 0.0, 1), rmf::PreconditionError);
  CHECK_THROWS_AS(rmf::random_thin(four, 1.5, 1), rmf::PreconditionError);

  const auto big = rmf::interval_set(table(), 1000, 199);
  const auto s1 = rmf::random_thin(big, 0.3, 1);
  const auto s2 = rmf::random_thin(big, 0.3, 2);
  CHECK(s1.size() == 60);
  CHECK(elems(s1) != elems(s2));
  for (const auto n : s1.support()) CHECK(big.contains(n));
}

TEST_CASE("twisted_weights") {
  const auto zero = rmf::twisted_weights(10, rmf::Theta::rational(0, 1));
  for (std::size_t i = 0; i < zero.size(); ++i) {
    CHECK(zero.weight(i) == std::complex<double>(1.0, 0.0));
  }
  const auto half = rmf::twisted_weights(10, rmf::Theta::rational(1, 2));
  for (std::size_t i = 0; i < half.size(); ++i) {
    const double sign = half[i] % 2 == 0 ? 1.0 : -1.0;
    CHECK(half.weight(i) == std::complex<double>(sign, 0.0));
  }
  const auto golden = rmf::twisted_weights(
      1000, rmf::Theta::quadratic(1, 1, 2, 5));
  CHECK(golden.variance() == 1000.0);
  for (std::size_t i = 0; i < golden.size(); ++i) {
    CHECK(std::abs(golden.weight(i)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // a_n = e(n theta) against a high-precision reference.
  const auto ref = oracle::sqrt_value(1, 1, 2, 5);
  for (const std::uint64_t n : {1ull, 17ull, 999ull}) {
    oracle::Float v = ref * n;
    v -= floor(v);
    const double angle = 2.0 * std::numbers::pi * v.convert_to<double>();
    CHECK(std::abs(golden.weight(n - 1) -
                   std::complex<double>(std::cos(angle), std::sin(angle))) <
          1e-12);
  }
}

TEST_CASE("WeightedSet invariants") {
  CHECK_THROWS_AS(ind({3, 2}), rmf::PreconditionError);
  CHECK_THROWS_AS(ind({2, 2}), rmf::PreconditionError);
  CHECK_THROWS_AS(ind({0, 2}), rmf::PreconditionError);
  CHECK_THROWS_AS(WeightedSet::weighted({2, 3}, {{1, 0}}, "w"),
                  rmf::PreconditionError);
  CHECK_THROWS_AS(WeightedSet::weighted({2, 3}, {{0, 0}, {0, 0}}, "w"),
                  rmf::PreconditionError);
  CHECK_THROWS_AS(WeightedSet::weighted({2}, {{NAN, 0}}, "w"),
                  rmf::PreconditionError);
  const auto w = WeightedSet::weighted({2, 3}, {{3, 4}, {0, 1}}, "w");
  CHECK(w.variance() == 26.0);
  CHECK(w.index_of(3) == 1);
  CHECK(w.index_of(4) == 2);

  // Filters keep weights and produce subsets.
  const auto f = w.filter([](std::uint64_t n) { return n == 3; }, "f");
  CHECK(f.size() == 1);
  CHECK(f.weight(0) == std::complex<double>(0, 1));
}
