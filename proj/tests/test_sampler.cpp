#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "rmf/errors.hpp"
#include "rmf/gaussianity.hpp"
#include "rmf/phase.hpp"
#include "rmf/philox.hpp"
#include "rmf/sampler.hpp"

using rmf::Model;
using rmf::ModelSample;
using rmf::WeightedSet;

namespace {

const rmf::SieveTable& table() {
  static const rmf::SieveTable t(1'010'000);
  return t;
}

WeightedSet ind(std::vector<std::uint64_t> s) {
  return WeightedSet::indicator(std::move(s), "t");
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  using C = rmf::PhiloxCounter;
  CHECK(rmf::philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(rmf::philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(rmf::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                           {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("unit_phase is exact on quarter turns") {
  CHECK(rmf::unit_phase(0) == std::complex<double>(1, 0));
  CHECK(rmf::unit_phase(1ull << 62) == std::complex<double>(0, 1));
  CHECK(rmf::unit_phase(1ull << 63) == std::complex<double>(-1, 0));
  CHECK(rmf::unit_phase(3ull << 62) == std::complex<double>(0, -1));
  const auto z = rmf::unit_phase(0x123456789abcdef0ull);
  CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parse_model") {
  CHECK(rmf::parse_model("steinhaus") == Model::kSteinhaus);
  CHECK(rmf::parse_model("rademacher") == Model::kRademacher);
  CHECK_THROWS_AS(rmf::parse_model("gauss"), std::invalid_argument);
  CHECK(rmf::model_name(Model::kRademacher) == "rademacher");
}

TEST_CASE("f_value examples") {
  for (const Model m : {Model::kSteinhaus, Model::kRademacher}) {
    const ModelSample s{m, 9, 4};
    CHECK(rmf::f_value(s, table(), 1) == std::complex<double>(1, 0));
  }
  const ModelSample rad{Model::kRademacher, 9, 4};
  CHECK(rmf::f_value(rad, table(), 4) == std::complex<double>(0, 0));
  CHECK(rmf::f_value(rad, table(), 12) == std::complex<double>(0, 0));
  const ModelSample st{Model::kSteinhaus, 9, 4};
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    CHECK(std::abs(rmf::f_value(st, table(), n)) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(rmf::f_value(st, table(), 0), rmf::RangeError);
  CHECK_THROWS_AS(rmf::f_value(st, table(), 2'000'000), rmf::RangeError);
}

TEST_CASE("multiplicativity") {
  for (std::uint64_t idx = 0; idx < 5; ++idx) {
    const ModelSample st{Model::kSteinhaus, 77, idx};
    const ModelSample rad{Model::kRademacher, 77, idx};
    for (std::uint64_t m = 1; m <= 60; ++m) {
      for (std::uint64_t n = 1; n <= 60; ++n) {
        // Completely multiplicative: phases add exactly mod 2^64.
        std::uint64_t phase = 0;
        for (const auto& [p, e] : table().factorize(m * n)) {
          phase += e * st.prime_phase(p);
        }
        std::uint64_t pm = 0, pn = 0;
        for (const auto& [p, e] : table().factorize(m)) pm += e * st.prime_phase(p);
        for (const auto& [p, e] : table().factorize(n)) pn += e * st.prime_phase(p);
        CHECK(phase == pm + pn);
        CHECK(std::abs(rmf::f_value(st, table(), m * n) -
                       rmf::f_value(st, table(), m) *
                           rmf::f_value(st, table(), n)) < 1e-12);
        if (std::gcd(m, n) == 1) {
          CHECK(rmf::f_value(rad, table(), m * n) ==
                rmf::f_value(rad, table(), m) * rmf::f_value(rad, table(), n));
        }
      }
    }
  }
}

TEST_CASE("values are pure functions of (seed, index, p)") {
  const ModelSample a{Model::kSteinhaus, 5, 17};
  const ModelSample b{Model::kSteinhaus, 5, 17};
  const ModelSample c{Model::kSteinhaus, 5, 18};
  CHECK(a.prime_phase(101) == b.prime_phase(101));
  CHECK(a.prime_phase(101) != c.prime_phase(101));
  const ModelSample r{Model::kRademacher, 5, 17};
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 1'000'003u}) {
    CHECK((r.prime_sign(p) == 1 || r.prime_sign(p) == -1));
  }
}

TEST_CASE("normalized_sum examples") {
  const ModelSample st{Model::kSteinhaus, 1, 0};
  const ModelSample rad{Model::kRademacher, 1, 0};
  CHECK(rmf::normalized_sum(st, ind({1}), table()) == std::complex<double>(1, 0));
  CHECK(rmf::normalized_sum(rad, ind({4}), table()) == std::complex<double>(0, 0));
  CHECK_THROWS_AS(rmf::normalized_sum(st, WeightedSet(), table()),
                  rmf::PreconditionError);

  // Direct sum over the set with weights.
  const auto w = WeightedSet::weighted({2, 3, 10}, {{1, 0}, {0, 2}, {-1, 1}}, "w");
  std::complex<double> direct;
  for (std::size_t i = 0; i < w.size(); ++i) {
    direct += w.weight(i) * rmf::f_value(st, table(), w[i]);
  }
  direct /= std::sqrt(w.variance());
  CHECK(std::abs(rmf::normalized_sum(st, w, table()) - direct) < 1e-14);
}

TEST_CASE("martingale_components") {
  const ModelSample st{Model::kSteinhaus, 3, 2};
  const auto s = ind({2, 3, 4, 6});
  const auto comps = rmf::martingale_components(st, s, table());
  REQUIRE(comps.size() == 2);
  const double scale = 0.5;
  CHECK(std::abs(comps.at(2) - scale * (rmf::f_value(st, table(), 2) +
                                        rmf::f_value(st, table(), 4))) < 1e-14);
  CHECK(std::abs(comps.at(3) - scale * (rmf::f_value(st, table(), 3) +
                                        rmf::f_value(st, table(), 6))) < 1e-14);
  CHECK(std::abs(comps.at(2) + comps.at(3) -
                 rmf::normalized_sum(st, s, table())) < 1e-14);
  const auto single = rmf::martingale_components(st, ind({2}), table());
  CHECK(single.at(2) == rmf::normalized_sum(st, ind({2}), table()));
  CHECK_THROWS_AS(rmf::martingale_components(st, ind({1, 2}), table()),
                  rmf::PreconditionError);
}

TEST_CASE("sample_batch determinism") {
  const auto one = rmf::sample_batch(Model::kSteinhaus, ind({1}), table(), 5, 3);
  CHECK(one.size() == 5);
  for (const auto& z : one.values) CHECK(z == std::complex<double>(1, 0));
  CHECK_THROWS_AS(rmf::sample_batch(Model::kSteinhaus, ind({1}), table(), 0, 3),
                  rmf::PreconditionError);

  const auto set = rmf::interval_set(table(), 5000, 700);
  const auto b1 = rmf::sample_batch(Model::kSteinhaus, set, table(), 333, 8, 1);
  const auto b2 = rmf::sample_batch(Model::kSteinhaus, set, table(), 333, 8, 4);
  const auto b3 = rmf::sample_batch(Model::kSteinhaus, set, table(), 333, 8, 1);
  CHECK(b1.values == b2.values);
  CHECK(b1.values == b3.values);
  // Sample i is sample_index i.
  CHECK(b1.values[100] == rmf::normalized_sum({Model::kSteinhaus, 8, 100}, set,
                                              table()));
  const auto r = rmf::sample_batch(Model::kRademacher, set, table(), 50, 8, 3);
  for (const auto& z : r.values) CHECK(z.imag() == 0.0);
}

TEST_CASE("orthogonality of Steinhaus values") {
  const std::uint64_t m_samples = 10'000;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> pick(1, 10'000);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  while (pairs.size() < 20) {
    const auto m = pick(rng), n = pick(rng);
    if (m != n) pairs.emplace_back(m, n);
  }
  for (const auto& [m, n] : pairs) {
    std::complex<double> mean, self;
    for (std::uint64_t i = 0; i < m_samples; ++i) {
      const ModelSample s{Model::kSteinhaus, 123, i};
      const auto fm = rmf::f_value(s, table(), m);
      mean += fm * std::conj(rmf::f_value(s, table(), n));
      self += fm * std::conj(fm);
    }
    mean /= static_cast<double>(m_samples);
    self /= static_cast<double>(m_samples);
    // Standard error of the mean of a unit-modulus variable is <= M^{-1/2}.
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(m_samples)));
    CHECK(std::abs(self - 1.0) < 1e-12);
  }
}

TEST_CASE("fourth moment over {1, 2} approaches 6/V^2") {
  const auto batch =
      rmf::sample_batch(Model::kSteinhaus, ind({1, 2}), table(), 20'000, 99);
  const auto rep = rmf::moment_report(batch, 6);
  CHECK(*rep.exact_abs4 == 1.5);
  CHECK(std::fabs(rep.mean_abs4 - 1.5) < 5 * rep.se_abs4);
}

TEST_CASE("mean |Z|^2 over interval_set(10^6, 5000)") {
  const auto set = rmf::interval_set(table(), 1'000'000, 5000);
  const auto batch = rmf::sample_batch(Model::kSteinhaus, set, table(), 5000, 1);
  const auto rep = rmf::moment_report(batch);
  CHECK(std::fabs(rep.mean_abs2 - 1.0) < 0.05);
}
