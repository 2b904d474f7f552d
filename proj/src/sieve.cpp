#include "rmf/sieve.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "rmf/errors.hpp"

namespace rmf {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'M', 'F', 'S', 'I', 'E', 'V', 'E'};
constexpr std::size_t kHeaderBytes = kMagic.size() + 1 + 8;

static_assert(std::endian::native == std::endian::little,
              "sieve cache I/O assumes a little-endian host");

}  // namespace

SieveTable::SieveTable(std::uint64_t limit) {
  if (limit < 2 || limit > kMaxLimit) {
    throw SizeError("sieve limit must lie in [2, 2^31], got " +
                    std::to_string(limit));
  }
  limit_ = limit;
  spf_.assign(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t lp = spf_[i];
    for (const std::uint32_t p : primes) {
      const std::uint64_t m = i * p;
      if (p > lp || m > limit) break;
      spf_[m] = p;
    }
  }
}

SieveTable SieveTable::from_entries(std::uint64_t limit,
                                    std::vector<std::uint32_t> spf) {
  if (limit < 2 || limit > kMaxLimit) {
    throw SizeError("sieve limit must lie in [2, 2^31], got " +
                    std::to_string(limit));
  }
  if (spf.size() != limit + 1) {
    throw CorruptDataError("sieve entry count does not match limit");
  }
  spf[0] = spf[1] = 0;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint64_t p = spf[n];
    // p must divide n, and either p == n (prime) or p is itself prime
    // with spf[p] == p and no smaller factor.
    if (p < 2 || p > n || n % p != 0 || (p != n && spf[p] != p) ||
        (n / p >= 2 && spf[n / p] < p)) {
      throw CorruptDataError("sieve entry for " + std::to_string(n) +
                             " is not its smallest prime factor");
    }
  }
  SieveTable t;
  t.limit_ = limit;
  t.spf_ = std::move(spf);
  return t;
}

void SieveTable::check_range(std::uint64_t n, std::uint64_t lo) const {
  if (n < lo || n > limit_) {
    throw RangeError(std::to_string(n) + " outside sieve range [" +
                     std::to_string(lo) + ", " + std::to_string(limit_) + "]");
  }
}

std::uint32_t SieveTable::smallest_prime_factor(std::uint64_t n) const {
  check_range(n, 2);
  return spf_[n];
}

bool SieveTable::is_prime(std::uint64_t n) const {
  check_range(n, 1);
  return n >= 2 && spf_[n] == n;
}

Factorization SieveTable::factorize(std::uint64_t n) const {
  check_range(n, 1);
  Factorization out;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    std::uint32_t e = 0;
    do {
      n /= p;
      ++e;
    } while (n % p == 0);
    out.push_back({p, e});
  }
  return out;
}

std::uint32_t SieveTable::largest_prime_factor(std::uint64_t n) const {
  check_range(n, 1);
  std::uint32_t p = 1;
  while (n > 1) {
    p = spf_[n];
    n /= p;
  }
  return p;
}

std::uint32_t SieveTable::big_omega_truncated(std::uint64_t n,
                                              std::uint64_t t) const {
  check_range(n, 1);
  std::uint32_t count = 0;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    if (p > t) break;  // spf is nondecreasing along the division chain
    n /= p;
    ++count;
  }
  return count;
}

bool SieveTable::is_squarefree(std::uint64_t n) const {
  check_range(n, 1);
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

bool SieveTable::is_sum_of_two_squares(std::uint64_t n) const {
  for (const auto& [p, e] : factorize(n)) {
    if (p % 4 == 3 && e % 2 == 1) return false;
  }
  return true;
}

std::uint64_t sieve_cache_size_bytes(std::uint64_t limit) {
  return kHeaderBytes + 4 * (limit - 1);
}

void save_sieve(const SieveTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kSieveFormatVersion));
  const std::uint64_t limit = table.limit();
  out.write(reinterpret_cast<const char*>(&limit), sizeof limit);
  const auto entries = table.entries();
  out.write(reinterpret_cast<const char*>(entries.data()),
            static_cast<std::streamsize>(entries.size_bytes()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

SieveTable load_sieve(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::array<char, kMagic.size()> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw CorruptDataError(path.string() + ": bad magic, not a sieve cache");
  }
  const int version = in.get();
  if (version != kSieveFormatVersion) {
    throw CorruptDataError(path.string() + ": unsupported format version " +
                           std::to_string(version));
  }
  std::uint64_t limit = 0;
  in.read(reinterpret_cast<char*>(&limit), sizeof limit);
  if (!in) throw CorruptDataError(path.string() + ": truncated header");
  if (limit < 2 || limit > SieveTable::kMaxLimit) {
    throw CorruptDataError(path.string() + ": limit out of range");
  }
  const auto actual = std::filesystem::file_size(path);
  if (actual != sieve_cache_size_bytes(limit)) {
    throw CorruptDataError(path.string() + ": expected " +
                           std::to_string(sieve_cache_size_bytes(limit)) +
                           " bytes, found " + std::to_string(actual));
  }
  std::vector<std::uint32_t> spf(limit + 1, 0);
  in.read(reinterpret_cast<char*>(spf.data() + 2),
          static_cast<std::streamsize>(4 * (limit - 1)));
  if (!in) throw CorruptDataError(path.string() + ": truncated entries");
  return SieveTable::from_entries(limit, std::move(spf));
}

}  // namespace rmf
