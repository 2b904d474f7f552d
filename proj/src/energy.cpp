#include "rmf/energy.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <numeric>
#include <string>
#include <thread>

#include "rmf/errors.hpp"
#include "rmf/simd/kernels.hpp"

namespace rmf {

namespace {

constexpr std::uint64_t kU32Max = 0xffffffffULL;

void require_nonempty(const WeightedSet& set) {
  if (set.empty()) throw PreconditionError("energy of an empty set");
}

void require_32bit(const WeightedSet& set) {
  if (!set.empty() && set.max_element() > kU32Max) {
    throw PreconditionError("elements must be below 2^32 for 64-bit products");
  }
}

void require_no_one(const WeightedSet& set) {
  if (!set.empty() && set.min_element() < 2) {
    throw PreconditionError("set " + set.label() +
                            " contains 1; elements must be >= 2");
  }
}

std::vector<std::uint32_t> narrow(const WeightedSet& set) {
  std::vector<std::uint32_t> out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(set[i]);
  }
  return out;
}

std::uint64_t pair_count(std::size_t n) {
  return n < 2 ? 0 : std::uint64_t{n} * (n - 1) / 2;
}

std::uint64_t row_offset(std::size_t n, std::size_t i) {
  return std::uint64_t{i} * n - std::uint64_t{i} * (i + 1) / 2;
}

// A row function writes the keys of pairs (i, j), j = i+1..n-1, into out.
template <class RowFn>
std::vector<std::uint64_t> all_pair_keys(std::size_t n, unsigned threads,
                                         const RowFn& row) {
  std::vector<std::uint64_t> keys(pair_count(n));
  const unsigned workers = std::max(1u, threads);
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i + 1 < n; i += workers) {
      row(i, std::span<std::uint64_t>(keys.data() + row_offset(n, i),
                                      n - 1 - i));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t);
  }
  return keys;
}

// Calls visit(key, multiplicity) once per distinct key among pairs i < j.
template <class RowFn, class Visit>
void tally_pairs(std::size_t n, const EnergyOptions& options, const RowFn& row,
                 const Visit& visit) {
  if (std::uint64_t{n} * n <= options.hash_pair_threshold) {
    absl::flat_hash_map<std::uint64_t, std::uint64_t> counts;
    counts.reserve(pair_count(n));
    std::vector<std::uint64_t> buffer(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::span<std::uint64_t> out(buffer.data(), n - 1 - i);
      row(i, out);
      for (const std::uint64_t k : out) ++counts[k];
    }
    for (const auto& [k, c] : counts) visit(k, c);
    return;
  }
  std::vector<std::uint64_t> keys = all_pair_keys(n, options.threads, row);
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    visit(keys[i], j - i);
    i = j;
  }
}

// Reduced fraction m/n packed as (m/g) << 32 | (n/g).
inline std::uint64_t fraction_key(std::uint64_t m, std::uint64_t n) {
  const std::uint64_t g = std::gcd(m, n);
  return ((m / g) << 32) | (n / g);
}

inline std::uint64_t swap_fraction(std::uint64_t key) {
  return (key << 32) | (key >> 32);
}

}  // namespace

std::uint64_t multiplicative_energy(const WeightedSet& set,
                                    const EnergyOptions& options) {
  require_nonempty(set);
  require_32bit(set);
  const auto elems = narrow(set);
  const std::size_t n = elems.size();

  // c(r) counts ordered pairs: twice the unordered off-diagonal pairs plus
  // one if r is the square of an element.
  absl::flat_hash_map<std::uint64_t, bool> squares;
  squares.reserve(n);
  for (const std::uint32_t s : elems) squares[std::uint64_t{s} * s] = false;

  std::uint64_t energy = 0;
  tally_pairs(
      n, options,
      [&](std::size_t i, std::span<std::uint64_t> out) {
        simd::multiply_row(elems[i],
                           std::span<const std::uint32_t>(elems).subspan(i + 1),
                           out);
      },
      [&](std::uint64_t r, std::uint64_t u) {
        std::uint64_t c = 2 * u;
        if (auto it = squares.find(r); it != squares.end()) {
          ++c;
          it->second = true;
        }
        energy += c * c;
      });
  for (const auto& [r, seen] : squares) {
    if (!seen) ++energy;
  }
  return energy;
}

OffDiagonal enumerate_offdiagonal(const WeightedSet& set, std::uint64_t cap,
                                  const EnergyOptions& options) {
  require_nonempty(set);
  require_32bit(set);
  const auto elems = narrow(set);
  const std::size_t n = elems.size();
  const auto row = [&](std::size_t i, std::span<std::uint64_t> out) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out[j - i - 1] = fraction_key(elems[i], elems[j]);
    }
  };

  // Pairs i < j give fractions a/b with a < b; each such class of size c
  // and its mirror b/a contribute 2 c (c - 1) ordered quadruples.
  OffDiagonal result;
  std::vector<std::uint64_t> repeated;
  tally_pairs(n, options, row, [&](std::uint64_t key, std::uint64_t c) {
    if (c < 2) return;
    result.count += 2 * c * (c - 1);
    repeated.push_back(key);
  });
  if (cap == 0 || result.count == 0) {
    result.truncated = result.count > 0;
    return result;
  }

  std::sort(repeated.begin(), repeated.end());
  struct Member {
    std::uint64_t key;
    std::uint64_t g;
  };
  std::vector<Member> members;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint64_t key = fraction_key(elems[i], elems[j]);
      if (std::binary_search(repeated.begin(), repeated.end(), key)) {
        members.push_back({key, elems[i] / (key >> 32)});
      }
    }
  }
  std::sort(members.begin(), members.end(), [](const Member& x, const Member& y) {
    return x.key != y.key ? x.key < y.key : x.g < y.g;
  });

  const auto emit = [&](const Quadruple& q) {
    if (result.quadruples.size() >= cap) {
      result.truncated = true;
      return false;
    }
    result.quadruples.push_back(q);
    return true;
  };
  for (std::size_t lo = 0; lo < members.size();) {
    std::size_t hi = lo + 1;
    while (hi < members.size() && members[hi].key == members[lo].key) ++hi;
    const std::uint64_t a = members[lo].key >> 32;
    const std::uint64_t b = members[lo].key & kU32Max;
    for (int mirror = 0; mirror < 2; ++mirror) {
      for (std::size_t x = lo; x < hi; ++x) {
        for (std::size_t y = lo; y < hi; ++y) {
          if (x == y) continue;
          const std::uint64_t g = members[x].g, h = members[y].g;
          const Quadruple q = mirror == 0 ? Quadruple{g * a, h * b, g * b, h * a}
                                          : Quadruple{g * b, h * a, g * a, h * b};
          if (!emit(q)) return result;
        }
      }
    }
    lo = hi;
  }
  return result;
}

std::uint64_t square_energy(const SieveTable& table, const WeightedSet& set,
                            const EnergyOptions& options) {
  require_nonempty(set);
  require_32bit(set);
  for (const std::uint64_t s : set.support()) {
    if (!table.is_squarefree(s)) {
      throw PreconditionError("square energy needs square-free elements; " +
                              std::to_string(s) + " is not");
    }
  }
  const auto elems = narrow(set);
  const std::size_t n = elems.size();
  // For square-free m, n the kernel of m n is (m/g)(n/g); n1 n2 n3 n4 is a
  // square iff the kernels of n1 n2 and n3 n4 agree. Diagonal pairs all have
  // kernel 1, which no off-diagonal pair can reach.
  std::uint64_t energy = std::uint64_t{n} * n;
  tally_pairs(
      n, options,
      [&](std::size_t i, std::span<std::uint64_t> out) {
        const std::uint64_t m = elems[i];
        for (std::size_t j = i + 1; j < n; ++j) {
          const std::uint64_t g = std::gcd(m, std::uint64_t{elems[j]});
          out[j - i - 1] = (m / g) * (elems[j] / g);
        }
      },
      [&](std::uint64_t, std::uint64_t u) { energy += 4 * u * u; });
  return energy;
}

ConditionSums condition_sums(const SieveTable& table, const WeightedSet& set) {
  require_no_one(set);
  require_32bit(set);

  // Ordered pairs (m, n) with P(m) = P(n), keyed by the reduced fraction
  // m/n and by the shared largest prime.
  struct Entry {
    std::uint64_t fraction;
    std::uint32_t prime;
    std::complex<double> weight;  // a_m conj(a_n)
  };
  std::map<std::uint32_t, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < set.size(); ++i) {
    classes[table.largest_prime_factor(set[i])].push_back(i);
  }
  std::vector<Entry> entries;
  for (const auto& [p, members] : classes) {
    for (const std::size_t i : members) {
      for (const std::size_t j : members) {
        entries.push_back({fraction_key(set[i], set[j]), p,
                           set.weight(i) * std::conj(set.weight(j))});
      }
    }
  }

  // Aggregate per (fraction) and per (fraction, prime).
  struct Group {
    std::uint64_t fraction;
    std::uint32_t prime;
    std::complex<double> weight;
    std::int64_t count;
  };
  const auto aggregate = [&](bool by_prime) {
    std::sort(entries.begin(), entries.end(), [&](const Entry& x, const Entry& y) {
      if (x.fraction != y.fraction) return x.fraction < y.fraction;
      return by_prime && x.prime < y.prime;
    });
    std::vector<Group> groups;
    for (const Entry& e : entries) {
      if (!groups.empty() && groups.back().fraction == e.fraction &&
          (!by_prime || groups.back().prime == e.prime)) {
        groups.back().weight += e.weight;
        ++groups.back().count;
      } else {
        groups.push_back({e.fraction, by_prime ? e.prime : 0u, e.weight, 1});
      }
    }
    return groups;
  };
  const auto find = [](const std::vector<Group>& groups, std::uint64_t fraction,
                       std::uint32_t prime) -> const Group* {
    const auto it = std::lower_bound(
        groups.begin(), groups.end(), std::pair{fraction, prime},
        [](const Group& g, const std::pair<std::uint64_t, std::uint32_t>& k) {
          return g.fraction != k.first ? g.fraction < k.first
                                       : g.prime < k.second;
        });
    return (it != groups.end() && it->fraction == fraction &&
            it->prime == prime)
               ? &*it
               : nullptr;
  };
  constexpr std::uint64_t kUnit = (std::uint64_t{1} << 32) | 1;

  ConditionSums out;
  std::int64_t count2 = 0, count3 = 0;
  // m1/n1 = n2/m2 = r: pair (m1, n1) in class r, (m2, n2) in class 1/r.
  const auto plain = aggregate(false);
  for (const Group& g : plain) {
    if (g.fraction == kUnit) continue;
    if (const Group* mirror = find(plain, swap_fraction(g.fraction), 0)) {
      out.cond2 += g.weight * mirror->weight;
      count2 += g.count * mirror->count;
    }
  }
  const auto by_prime = aggregate(true);
  for (const Group& g : by_prime) {
    if (const Group* mirror =
            find(by_prime, swap_fraction(g.fraction), g.prime)) {
      out.cond3 += g.weight * mirror->weight;
      count3 += g.count * mirror->count;
    }
  }
  if (set.is_indicator()) {
    out.cond2_count = count2;
    out.cond3_count = count3;
  }
  return out;
}

PrimeHistogram per_prime_histogram(const SieveTable& table,
                                   const WeightedSet& set) {
  require_no_one(set);
  PrimeHistogram h;
  for (const std::uint64_t s : set.support()) {
    ++h.counts[table.largest_prime_factor(s)];
  }
  for (const auto& [p, c] : h.counts) {
    if (c > h.max_count) {
      h.max_count = c;
      h.argmax = p;
    }
  }
  return h;
}

std::uint64_t product_set_size(const WeightedSet& set, int k) {
  if (k < 1 || k > 3) throw PreconditionError("product sets need k in {1,2,3}");
  if (k == 1) return set.size();
  require_nonempty(set);
  require_32bit(set);
  const auto elems = narrow(set);
  const std::size_t n = elems.size();
  std::vector<std::uint64_t> products;
  if (k == 2) {
    products.resize(n * (n + 1) / 2);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      simd::multiply_row(elems[i], std::span<const std::uint32_t>(elems).subspan(i),
                         std::span<std::uint64_t>(products.data() + pos, n - i));
      pos += n - i;
    }
  } else {
    if (set.max_element() > (std::uint64_t{1} << 21)) {
      throw PreconditionError("triple products need elements <= 2^21");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const std::uint64_t ij = std::uint64_t{elems[i]} * elems[j];
        for (std::size_t l = j; l < n; ++l) products.push_back(ij * elems[l]);
      }
    }
  }
  std::sort(products.begin(), products.end());
  return static_cast<std::uint64_t>(
      std::unique(products.begin(), products.end()) - products.begin());
}

EnergyReport energy_report(const SieveTable& table, const WeightedSet& set,
                           const EnergyRequest& request,
                           const EnergyOptions& options) {
  require_nonempty(set);
  EnergyReport r;
  r.set_size = set.size();
  r.e_times = multiplicative_energy(set, options);
  const std::uint64_t n = set.size();
  r.offdiagonal = r.e_times - (2 * n * n - n);
  const bool squarefree = std::all_of(
      set.support().begin(), set.support().end(),
      [&](std::uint64_t s) { return table.is_squarefree(s); });
  if (squarefree) r.e_square = square_energy(table, set, options);
  if (set.min_element() >= 2) {
    r.conditions = condition_sums(table, set);
    r.histogram = per_prime_histogram(table, set);
  }
  for (const int k : request.product_ks) {
    r.product_set_sizes[k] = product_set_size(set, k);
  }
  if (request.offdiagonal_cap > 0) {
    auto off = enumerate_offdiagonal(set, request.offdiagonal_cap, options);
    r.sample_offdiagonal = std::move(off.quadruples);
    r.sample_truncated = off.truncated;
  }
  return r;
}

}  // namespace rmf
