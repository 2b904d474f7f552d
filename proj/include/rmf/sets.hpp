#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rmf/sieve.hpp"
#include "rmf/theta.hpp"

namespace rmf {

// Finite support n_1 < n_2 < ... with complex weights a_n. Indicator sets
// store no weights (every a_n is exactly 1).
class WeightedSet {
 public:
  WeightedSet() = default;

  // Throws PreconditionError unless support is strictly increasing and >= 1.
  static WeightedSet indicator(std::vector<std::uint64_t> support,
                               std::string label);
  // As above; weights must be finite, one per element, and not all zero.
  static WeightedSet weighted(std::vector<std::uint64_t> support,
                              std::vector<std::complex<double>> weights,
                              std::string label);
  // Weights declared to have modulus 1 (checked to 1e-12); V is then |support|
  // exactly rather than a floating-point sum.
  static WeightedSet unit_modulus(std::vector<std::uint64_t> support,
                                  std::vector<std::complex<double>> weights,
                                  std::string label);

  std::span<const std::uint64_t> support() const noexcept { return support_; }
  std::size_t size() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }
  bool is_indicator() const noexcept { return weights_.empty(); }
  std::uint64_t operator[](std::size_t i) const { return support_[i]; }
  std::complex<double> weight(std::size_t i) const {
    return weights_.empty() ? std::complex<double>(1.0, 0.0) : weights_[i];
  }
  // Empty for indicator sets.
  std::span<const std::complex<double>> weights() const noexcept {
    return weights_;
  }
  const std::string& label() const noexcept { return label_; }

  // V = sum |a_n|^2.
  double variance() const noexcept { return variance_; }
  std::uint64_t min_element() const { return support_.front(); }
  std::uint64_t max_element() const { return support_.back(); }
  bool contains(std::uint64_t n) const;
  // Index of n in the support, or size() when absent.
  std::size_t index_of(std::uint64_t n) const;

  // Elements satisfying keep, weights carried over.
  WeightedSet filter(const std::function<bool(std::uint64_t)>& keep,
                     std::string label) const;

  friend bool operator==(const WeightedSet&, const WeightedSet&) = default;

 private:
  void validate_support() const;
  void compute_variance();

  std::vector<std::uint64_t> support_;
  std::vector<std::complex<double>> weights_;
  std::string label_;
  double variance_ = 0.0;
  bool unit_modulus_ = false;
};

// {x, ..., x + y}. Throws PreconditionError for x = 0, RangeError if x + y
// exceeds the sieve limit or overflows.
WeightedSet interval_set(const SieveTable& table, std::uint64_t x,
                         std::uint64_t y);

// {p + k : p prime, 2 <= p + k <= n}. Elements <= 1 are dropped and the drop
// count is written into the label. Throws PreconditionError for k = 0.
WeightedSet shifted_primes_set(const SieveTable& table, std::uint64_t n,
                               std::int64_t k);

// Sums of two squares in [x, x + y].
WeightedSet two_squares_set(const SieveTable& table, std::uint64_t x,
                            std::uint64_t y);

// Keeps n >= 2 with Omega(n) <= k.
WeightedSet typical_filter(const SieveTable& table, const WeightedSet& set,
                           std::uint32_t k);

// Keeps n with Omega(n; min(e^{e^j}, limit)) <= (1/2 + epsilon) j for every
// integer j in [k_min, k_max].
WeightedSet two_squares_typical_filter(const SieveTable& table,
                                       const WeightedSet& set, double epsilon,
                                       int k_min, int k_max);

// Integer range of k with lo <= e^{e^k} <= hi, rounded inward. Empty
// (first > second) when no integer qualifies.
std::pair<int, int> double_exponential_range(double lo, double hi);

WeightedSet squarefree_filter(const SieveTable& table, const WeightedSet& set);

// Uniform random subset of size floor(rho |set|), determined by seed.
// Throws PreconditionError unless 0 < rho <= 1.
WeightedSet random_thin(const WeightedSet& set, double rho, std::uint64_t seed);

// Support {1..n}, a_m = e(m theta) computed from the 128-bit fixed-point
// fractional part of theta.
WeightedSet twisted_weights(std::uint64_t n, const Theta& theta);

}  // namespace rmf
