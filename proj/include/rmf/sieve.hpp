#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

namespace rmf {

struct PrimePower {
  std::uint32_t prime;
  std::uint32_t exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Prime powers in strictly increasing prime order. Empty for n = 1.
using Factorization = std::vector<PrimePower>;

// Passing this as the truncation point of big_omega_truncated counts every
// prime factor.
inline constexpr std::uint64_t kNoTruncation =
    std::numeric_limits<std::uint64_t>::max();

// Smallest-prime-factor table over [2, limit], built with a linear sieve
// (each composite is written exactly once). Entries are 32-bit, so the
// table costs about 4 bytes per integer. Immutable after construction.
class SieveTable {
 public:
  static constexpr std::uint64_t kMaxLimit = std::uint64_t{1} << 31;

  // Throws SizeError unless 2 <= limit <= 2^31.
  explicit SieveTable(std::uint64_t limit);

  // Adopts an spf array read from elsewhere; spf[n] for n in [2, limit],
  // entries 0 and 1 ignored. Throws CorruptDataError when an entry does not
  // divide its index or is not minimal relative to the cofactor's entry.
  static SieveTable from_entries(std::uint64_t limit,
                                 std::vector<std::uint32_t> spf);

  std::uint64_t limit() const noexcept { return limit_; }

  // Throws RangeError for n outside [2, limit].
  std::uint32_t smallest_prime_factor(std::uint64_t n) const;

  bool is_prime(std::uint64_t n) const;

  // Throws RangeError for n outside [1, limit].
  Factorization factorize(std::uint64_t n) const;

  // P(n); P(1) = 1.
  std::uint32_t largest_prime_factor(std::uint64_t n) const;

  // Omega(n; t): exponents summed over primes p <= t dividing n.
  std::uint32_t big_omega_truncated(std::uint64_t n, std::uint64_t t) const;
  std::uint32_t big_omega(std::uint64_t n) const {
    return big_omega_truncated(n, kNoTruncation);
  }

  bool is_squarefree(std::uint64_t n) const;

  // True iff every prime p = 3 (mod 4) divides n to an even power.
  bool is_sum_of_two_squares(std::uint64_t n) const;

  // Raw entries for n = 2..limit.
  std::span<const std::uint32_t> entries() const noexcept {
    return {spf_.data() + 2, spf_.size() - 2};
  }

 private:
  SieveTable() = default;
  void check_range(std::uint64_t n, std::uint64_t lo) const;

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;  // indexed by n, spf_[0] = spf_[1] = 0
};

// Binary cache: "RMFSIEVE", version byte, little-endian u64 limit, then
// little-endian u32 spf entries for n = 2..limit.
inline constexpr std::uint8_t kSieveFormatVersion = 1;

std::uint64_t sieve_cache_size_bytes(std::uint64_t limit);
void save_sieve(const SieveTable& table, const std::filesystem::path& path);
// Throws CorruptDataError on bad magic, version, length or contents.
SieveTable load_sieve(const std::filesystem::path& path);

}  // namespace rmf
