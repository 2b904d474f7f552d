#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rmf/sets.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

enum class Model { kSteinhaus, kRademacher };

std::string_view model_name(Model model);
// Throws std::invalid_argument for anything but "steinhaus"/"rademacher".
Model parse_model(std::string_view name);

// One realization of a random multiplicative function. Nothing is stored:
// f(p) is a pure function of (seed, sample_index, p).
struct ModelSample {
  Model model = Model::kSteinhaus;
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;

  // Steinhaus f(p) = e^{2 pi i u / 2^64}; this returns u.
  std::uint64_t prime_phase(std::uint32_t p) const;
  // Rademacher f(p) in {-1, +1}.
  int prime_sign(std::uint32_t p) const;
  std::complex<double> prime_value(std::uint32_t p) const;
};

// f(n): Steinhaus is completely multiplicative (phases add exactly mod 1);
// Rademacher vanishes off the square-free integers. f(1) = 1.
std::complex<double> f_value(const ModelSample& sample, const SieveTable& table,
                             std::uint64_t n);

// Factorizations of a set's elements, flattened so that one realization
// costs one generator call per distinct prime.
class PreparedSet {
 public:
  PreparedSet(const SieveTable& table, const WeightedSet& set);

  const WeightedSet& set() const noexcept { return *set_; }
  std::size_t size() const noexcept { return offsets_.size() - 1; }
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }
  // Index into primes() of P(n) for each element; element 1 maps to npos.
  std::size_t largest_prime_index(std::size_t i) const {
    return largest_[i];
  }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // f(n) for every element, split into real and imaginary parts.
  void evaluate(const ModelSample& sample, std::vector<double>& re,
                std::vector<double>& im) const;

  // V^{-1/2} sum a_n f(n).
  std::complex<double> normalized_sum(const ModelSample& sample) const;

 private:
  const WeightedSet* set_;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> prime_index_;
  std::vector<std::uint32_t> exponent_;
  std::vector<std::size_t> largest_;
  std::vector<double> w_re_, w_im_;
};

// Z = V^{-1/2} sum a_n f(n). Throws PreconditionError for an empty set.
std::complex<double> normalized_sum(const ModelSample& sample,
                                    const WeightedSet& set,
                                    const SieveTable& table);

// Z~_p = V^{-1/2} sum_{P(n) = p} a_n f(n); the values sum to Z. Throws
// PreconditionError if the set contains 1.
std::map<std::uint32_t, std::complex<double>> martingale_components(
    const ModelSample& sample, const WeightedSet& set, const SieveTable& table);

struct SampleBatch {
  Model model = Model::kSteinhaus;
  std::uint64_t seed = 0;
  std::string set_label;
  double variance = 0.0;  // V of the set, the normalizer of every Z
  std::vector<std::complex<double>> values;

  std::size_t size() const noexcept { return values.size(); }
};

// Z for sample indices 0..count-1. Output does not depend on `threads`.
// Throws PreconditionError for count = 0 or an empty set.
SampleBatch sample_batch(Model model, const WeightedSet& set,
                         const SieveTable& table, std::uint64_t count,
                         std::uint64_t seed, unsigned threads = 1);

}  // namespace rmf
