#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>

#include "oracles.hpp"
#include "rmf/energy.hpp"
#include "rmf/gaussianity.hpp"
#include "rmf/sampler.hpp"
#include "rmf/simd/kernels.hpp"

namespace simd = rmf::simd;
using simd::Isa;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::vector<double> random_doubles(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  std::vector<double> v(n);
  for (auto& x : v) x = std::ldexp(u(rng), expo(rng));
  return v;
}

const simd::KernelTable* avx2() {
  return simd::isa_supported(Isa::kAvx2) ? &simd::kernels_for(Isa::kAvx2)
                                         : nullptr;
}

}  // namespace

TEST_CASE("isa selection") {
  CHECK(simd::isa_supported(Isa::kScalar));
  CHECK(simd::isa_name(Isa::kAvx2) == "avx2");
  simd::force_isa(Isa::kScalar);
  CHECK(simd::active_isa() == Isa::kScalar);
  CHECK(simd::kernels().isa == Isa::kScalar);
  simd::reset_isa();
  if (simd::isa_supported(Isa::kAvx2) && std::getenv("RMF_SIMD") == nullptr) {
    CHECK(simd::active_isa() == Isa::kAvx2);
  } else if (!simd::isa_supported(Isa::kAvx2)) {
    CHECK_THROWS_AS(simd::force_isa(Isa::kAvx2), std::invalid_argument);
  }
  MESSAGE("active variant: " << simd::isa_name(simd::active_isa()));
}

TEST_CASE("multiply_row matches 64-bit products") {
  std::mt19937_64 rng(1);
  const auto& scalar = simd::kernels_for(Isa::kScalar);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 64u, 1001u}) {
    std::vector<std::uint32_t> ys(n);
    for (auto& y : ys) y = static_cast<std::uint32_t>(rng());
    if (n > 0) ys[0] = UINT32_MAX;
    const std::uint32_t x = n % 2 ? UINT32_MAX : static_cast<std::uint32_t>(rng());
    std::vector<std::uint64_t> ref(n), out(n);
    for (std::size_t i = 0; i < n; ++i) ref[i] = std::uint64_t{x} * ys[i];
    scalar.multiply_row(x, ys.data(), n, out.data());
    CHECK(out == ref);
    if (const auto* v = avx2()) {
      std::fill(out.begin(), out.end(), 0);
      v->multiply_row(x, ys.data(), n, out.data());
      CHECK(out == ref);
    }
  }
}

TEST_CASE("weighted_sum and power_sums are bitwise identical across variants") {
  const auto* v = avx2();
  if (v == nullptr) {
    MESSAGE("AVX2 not available; only the scalar reference runs");
    return;
  }
  const auto& scalar = simd::kernels_for(Isa::kScalar);
  std::mt19937_64 rng(2);
  for (std::size_t n = 0; n <= 300; n += (n < 20 ? 1 : 37)) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto wr = random_doubles(rng, n), wi = random_doubles(rng, n);
      const auto fr = random_doubles(rng, n), fi = random_doubles(rng, n);
      const auto a = scalar.weighted_sum(wr.data(), wi.data(), fr.data(), fi.data(), n);
      const auto b = v->weighted_sum(wr.data(), wi.data(), fr.data(), fi.data(), n);
      CHECK(same_bits(a.re, b.re));
      CHECK(same_bits(a.im, b.im));

      const auto p = scalar.power_sums(fr.data(), fi.data(), n);
      const auto q = v->power_sums(fr.data(), fi.data(), n);
      CHECK(same_bits(p.abs2, q.abs2));
      CHECK(same_bits(p.abs4, q.abs4));
      CHECK(same_bits(p.sq_re, q.sq_re));
      CHECK(same_bits(p.sq_im, q.sq_im));
    }
  }
}

TEST_CASE("compensated sums are accurate") {
  std::mt19937_64 rng(3);
  const std::size_t n = 5000;
  const auto fr = random_doubles(rng, n), fi = random_doubles(rng, n);
  const std::vector<double> ones(n, 1.0), zeros(n, 0.0);
  oracle::Float ref_re = 0, ref_abs4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ref_re += oracle::Float(fr[i]);
    const oracle::Float a2 = oracle::Float(fr[i]) * fr[i] + oracle::Float(fi[i]) * fi[i];
    ref_abs4 += a2 * a2;
  }
  for (const Isa isa : {Isa::kScalar, Isa::kAvx2}) {
    if (!simd::isa_supported(isa)) continue;
    const auto& k = simd::kernels_for(isa);
    const auto s = k.weighted_sum(ones.data(), zeros.data(), fr.data(), fi.data(), n);
    CHECK(s.re == doctest::Approx(ref_re.convert_to<double>()).epsilon(1e-15));
    const auto p = k.power_sums(fr.data(), fi.data(), n);
    CHECK(p.abs4 == doctest::Approx(ref_abs4.convert_to<double>()).epsilon(1e-14));
  }
  // Cancellation inside a single lane.
  const std::vector<double> cancel = {1e16, 0, 0, 0, 1.0, 0, 0, 0, -1e16};
  const std::vector<double> w(cancel.size(), 1.0), z(cancel.size(), 0.0);
  CHECK(simd::kernels_for(Isa::kScalar)
            .weighted_sum(w.data(), z.data(), cancel.data(), z.data(), cancel.size())
            .re == 1.0);
}

TEST_CASE("library results do not depend on the variant") {
  if (avx2() == nullptr) return;
  const rmf::SieveTable table(200'000);
  const auto set = rmf::interval_set(table, 100'000, 3000);
  std::vector<std::uint64_t> energies;
  std::vector<rmf::SampleBatch> batches;
  std::vector<rmf::MomentReport> moments;
  for (const Isa isa : {Isa::kScalar, Isa::kAvx2}) {
    simd::force_isa(isa);
    energies.push_back(rmf::multiplicative_energy(set));
    batches.push_back(rmf::sample_batch(rmf::Model::kSteinhaus, set, table, 200, 5, 2));
    moments.push_back(rmf::moment_report(batches.back()));
  }
  simd::reset_isa();
  CHECK(energies[0] == energies[1]);
  REQUIRE(batches[0].size() == batches[1].size());
  for (std::size_t i = 0; i < batches[0].size(); ++i) {
    REQUIRE(same_bits(batches[0].values[i].real(), batches[1].values[i].real()));
    REQUIRE(same_bits(batches[0].values[i].imag(), batches[1].values[i].imag()));
  }
  CHECK(same_bits(moments[0].mean_abs4, moments[1].mean_abs4));
  CHECK(same_bits(moments[0].mean_abs2, moments[1].mean_abs2));
}
