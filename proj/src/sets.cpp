#include "rmf/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rmf/errors.hpp"
#include "rmf/phase.hpp"
#include "rmf/philox.hpp"
#include "rmf/simd/kernels.hpp"

namespace rmf {

WeightedSet WeightedSet::indicator(std::vector<std::uint64_t> support,
                                   std::string label) {
  WeightedSet s;
  s.support_ = std::move(support);
  s.label_ = std::move(label);
  s.validate_support();
  s.variance_ = static_cast<double>(s.support_.size());
  return s;
}

WeightedSet WeightedSet::weighted(std::vector<std::uint64_t> support,
                                  std::vector<std::complex<double>> weights,
                                  std::string label) {
  if (weights.size() != support.size()) {
    throw PreconditionError("weight count does not match support size");
  }
  WeightedSet s;
  s.support_ = std::move(support);
  s.weights_ = std::move(weights);
  s.label_ = std::move(label);
  s.validate_support();
  for (const auto& w : s.weights_) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
      throw PreconditionError("non-finite weight in set " + s.label_);
    }
  }
  s.compute_variance();
  if (!s.empty() && !(s.variance_ > 0.0)) {
    throw PreconditionError("set " + s.label_ + " has zero variance");
  }
  return s;
}

WeightedSet WeightedSet::unit_modulus(std::vector<std::uint64_t> support,
                                      std::vector<std::complex<double>> weights,
                                      std::string label) {
  WeightedSet s = weighted(std::move(support), std::move(weights),
                           std::move(label));
  for (const auto& w : s.weights_) {
    if (std::abs(std::norm(w) - 1.0) > 1e-12) {
      throw PreconditionError("weight of modulus != 1 in set " + s.label_);
    }
  }
  s.unit_modulus_ = true;
  s.compute_variance();
  return s;
}

void WeightedSet::validate_support() const {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] == 0) {
      throw PreconditionError("set " + label_ + " contains 0");
    }
    if (i > 0 && support_[i] <= support_[i - 1]) {
      throw PreconditionError("set " + label_ +
                              " support is not strictly increasing");
    }
  }
}

void WeightedSet::compute_variance() {
  if (weights_.empty() || unit_modulus_) {
    variance_ = static_cast<double>(support_.size());
    return;
  }
  std::vector<double> re(weights_.size()), im(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    re[i] = weights_[i].real();
    im[i] = weights_[i].imag();
  }
  variance_ = simd::power_sums(re, im).abs2;
}

bool WeightedSet::contains(std::uint64_t n) const {
  return std::binary_search(support_.begin(), support_.end(), n);
}

std::size_t WeightedSet::index_of(std::uint64_t n) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), n);
  return (it != support_.end() && *it == n)
             ? static_cast<std::size_t>(it - support_.begin())
             : support_.size();
}

WeightedSet WeightedSet::filter(const std::function<bool(std::uint64_t)>& keep,
                                std::string label) const {
  WeightedSet out;
  out.label_ = std::move(label);
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!keep(support_[i])) continue;
    out.support_.push_back(support_[i]);
    if (!weights_.empty()) out.weights_.push_back(weights_[i]);
  }
  out.unit_modulus_ = unit_modulus_;
  out.compute_variance();
  return out;
}

namespace {

void check_interval(const SieveTable& table, std::uint64_t x,
                    std::uint64_t y) {
  if (x == 0) throw PreconditionError("interval must start at x >= 1");
  if (y > table.limit() || x > table.limit() - y) {
    throw RangeError("interval [" + std::to_string(x) + ", x+" +
                     std::to_string(y) + "] exceeds sieve limit " +
                     std::to_string(table.limit()));
  }
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

WeightedSet interval_set(const SieveTable& table, std::uint64_t x,
                         std::uint64_t y) {
  check_interval(table, x, y);
  std::vector<std::uint64_t> support(y + 1);
  std::iota(support.begin(), support.end(), x);
  return WeightedSet::indicator(std::move(support),
                                "interval(x=" + std::to_string(x) +
                                    ",y=" + std::to_string(y) + ")");
}

WeightedSet shifted_primes_set(const SieveTable& table, std::uint64_t n,
                               std::int64_t k) {
  if (k == 0) throw PreconditionError("shift k must be nonzero");
  if (n < 2) throw PreconditionError("shifted primes need N >= 2");
  const __int128 hi = static_cast<__int128>(n) - k;  // largest usable prime
  if (hi > static_cast<__int128>(table.limit())) {
    throw RangeError("shifted primes need primes up to " +
                     std::to_string(static_cast<long long>(hi)) +
                     ", beyond sieve limit " + std::to_string(table.limit()));
  }
  std::vector<std::uint64_t> support;
  std::uint64_t dropped = 0;
  for (__int128 p = 2; p <= hi; ++p) {
    if (!table.is_prime(static_cast<std::uint64_t>(p))) continue;
    const __int128 v = p + k;
    if (v <= 1) {
      ++dropped;
      continue;
    }
    support.push_back(static_cast<std::uint64_t>(v));
  }
  return WeightedSet::indicator(
      std::move(support), "shifted_primes(N=" + std::to_string(n) +
                              ",k=" + std::to_string(k) +
                              ",dropped=" + std::to_string(dropped) + ")");
}

WeightedSet two_squares_set(const SieveTable& table, std::uint64_t x,
                            std::uint64_t y) {
  check_interval(table, x, y);
  std::vector<std::uint64_t> support;
  for (std::uint64_t n = x; n <= x + y; ++n) {
    if (table.is_sum_of_two_squares(n)) support.push_back(n);
  }
  return WeightedSet::indicator(std::move(support),
                                "two_squares(x=" + std::to_string(x) +
                                    ",y=" + std::to_string(y) + ")");
}

WeightedSet typical_filter(const SieveTable& table, const WeightedSet& set,
                           std::uint32_t k) {
  return set.filter(
      [&](std::uint64_t n) { return n >= 2 && table.big_omega(n) <= k; },
      set.label() + "|omega<=" + std::to_string(k));
}

WeightedSet two_squares_typical_filter(const SieveTable& table,
                                       const WeightedSet& set, double epsilon,
                                       int k_min, int k_max) {
  if (k_min > k_max) throw PreconditionError("k_min must not exceed k_max");
  if (k_min < 1) throw PreconditionError("k range must start at k >= 1");
  struct Level {
    std::uint64_t truncation;
    double bound;
  };
  std::vector<Level> levels;
  for (int k = k_min; k <= k_max; ++k) {
    const double t = std::exp(std::exp(static_cast<double>(k)));
    const std::uint64_t truncation =
        t >= static_cast<double>(table.limit())
            ? kNoTruncation
            : static_cast<std::uint64_t>(std::floor(t));
    levels.push_back({truncation, (0.5 + epsilon) * k});
  }
  return set.filter(
      [&](std::uint64_t n) {
        for (const auto& level : levels) {
          if (table.big_omega_truncated(n, level.truncation) > level.bound) {
            return false;
          }
        }
        return true;
      },
      set.label() + "|typical2sq(eps=" + fmt_double(epsilon) +
          ",k=" + std::to_string(k_min) + ".." + std::to_string(k_max) + ")");
}

std::pair<int, int> double_exponential_range(double lo, double hi) {
  const auto loglog = [](double v) {
    return v <= 1.0 ? -INFINITY : std::log(std::log(v));
  };
  const double bottom = loglog(lo);
  const int k_min =
      bottom > 1.0 ? static_cast<int>(std::ceil(bottom)) : 1;
  const double top = loglog(hi);
  const int k_max = std::isfinite(top) ? static_cast<int>(std::floor(top)) : 0;
  return {k_min, k_max};
}

WeightedSet squarefree_filter(const SieveTable& table, const WeightedSet& set) {
  return set.filter([&](std::uint64_t n) { return table.is_squarefree(n); },
                    set.label() + "|squarefree");
}

WeightedSet random_thin(const WeightedSet& set, double rho,
                        std::uint64_t seed) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw PreconditionError("thinning rho must lie in (0, 1]");
  }
  const std::size_t n = set.size();
  const auto keep = static_cast<std::size_t>(
      std::floor(rho * static_cast<double>(n)));
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  PhiloxStream rng(seed, 0x7468696eULL);  // "thin"
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + rng.next_below(n - i);
    std::swap(index[i], index[j]);
  }
  index.resize(keep);
  std::sort(index.begin(), index.end());

  std::string label = set.label() + "|thin(rho=" + fmt_double(rho) +
                      ",seed=" + std::to_string(seed) + ")";
  std::vector<bool> chosen(n, false);
  for (const std::size_t i : index) chosen[i] = true;
  std::size_t cursor = 0;
  return set.filter([&](std::uint64_t) { return chosen[cursor++]; },
                    std::move(label));
}

WeightedSet twisted_weights(std::uint64_t n, const Theta& theta) {
  if (n == 0) throw PreconditionError("twisted weights need N >= 1");
  std::vector<std::uint64_t> support(n);
  std::vector<std::complex<double>> weights(n);
  const Fixed128 step = theta.frac_fixed();
  Fixed128 phase = 0;
  for (std::uint64_t m = 1; m <= n; ++m) {
    phase += step;  // frac(m theta), wrapping mod 1
    support[m - 1] = m;
    weights[m - 1] = unit_phase(static_cast<std::uint64_t>(phase >> 64));
  }
  return WeightedSet::unit_modulus(
      std::move(support), std::move(weights),
      "twisted(N=" + std::to_string(n) + ",theta=" + theta.spec() + ")");
}

}  // namespace rmf
