#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rmf/sets.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

struct EnergyOptions {
  // Pair counts (|S|^2) up to this use a hash table; larger inputs sort a
  // flat array of keys instead, which keeps memory at 8 bytes per pair.
  std::uint64_t hash_pair_threshold = 100'000'000;
  unsigned threads = 1;
};

// E_x(S) = #{(s1,s2,s3,s4) in S^4 : s1 s2 = s3 s4}. Weights are ignored.
// Throws PreconditionError for an empty set or elements >= 2^32.
std::uint64_t multiplicative_energy(const WeightedSet& set,
                                    const EnergyOptions& options = {});

// Ordered (m1, m2, n1, n2) with m1 m2 = n1 n2 and {m1, m2} != {n1, n2}.
struct Quadruple {
  std::uint64_t m1, m2, n1, n2;
  friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

struct OffDiagonal {
  std::uint64_t count = 0;  // exact even when the listing is truncated
  std::vector<Quadruple> quadruples;
  bool truncated = false;
};

// Enumerates off-diagonal solutions through m1 = ga, n1 = gb, m2 = hb,
// n2 = ha with (a, b) = 1, a != b, g != h. At most `cap` quadruples are
// listed, grouped by (a, b) in increasing order.
OffDiagonal enumerate_offdiagonal(const WeightedSet& set, std::uint64_t cap,
                                  const EnergyOptions& options = {});

// E_sq(S) = #{(n1..n4) in S^4 : n1 n2 n3 n4 is a perfect square}. Every
// element must be square-free; the first offender is named in the
// PreconditionError otherwise.
std::uint64_t square_energy(const SieveTable& table, const WeightedSet& set,
                            const EnergyOptions& options = {});

// Weighted sums over m1 m2 = n1 n2 of a_{m1} a_{m2} conj(a_{n1} a_{n2}):
//   cond2: m1 != n1, m2 != n2, P(m1) = P(n1), P(m2) = P(n2);
//   cond3: P(m1) = P(n1) = P(m2) = P(n2), diagonals included.
// The exact integer counts are filled in for indicator sets.
struct ConditionSums {
  std::complex<double> cond2;
  std::complex<double> cond3;
  std::optional<std::int64_t> cond2_count;
  std::optional<std::int64_t> cond3_count;
};

// Throws PreconditionError if the set contains 1.
ConditionSums condition_sums(const SieveTable& table, const WeightedSet& set);

struct PrimeHistogram {
  std::map<std::uint32_t, std::uint32_t> counts;  // p -> #{s : P(s) = p}
  std::uint32_t max_count = 0;
  std::uint32_t argmax = 0;  // smallest prime attaining max_count
};

// Throws PreconditionError if the set contains 1.
PrimeHistogram per_prime_histogram(const SieveTable& table,
                                   const WeightedSet& set);

// |S^{.k}| for k in {1, 2, 3}. k = 3 requires max element <= 2^21.
std::uint64_t product_set_size(const WeightedSet& set, int k);

struct EnergyReport {
  std::uint64_t set_size = 0;
  std::uint64_t e_times = 0;
  std::uint64_t offdiagonal = 0;
  std::optional<std::uint64_t> e_square;  // square-free sets only
  std::optional<ConditionSums> conditions;  // sets without 1 only
  std::optional<PrimeHistogram> histogram;  // sets without 1 only
  std::map<int, std::uint64_t> product_set_sizes;
  std::vector<Quadruple> sample_offdiagonal;
  bool sample_truncated = false;
};

struct EnergyRequest {
  std::vector<int> product_ks;
  std::uint64_t offdiagonal_cap = 0;
};

EnergyReport energy_report(const SieveTable& table, const WeightedSet& set,
                           const EnergyRequest& request = {},
                           const EnergyOptions& options = {});

}  // namespace rmf
