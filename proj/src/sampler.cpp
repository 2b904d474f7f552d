#include "rmf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rmf/errors.hpp"
#include "rmf/phase.hpp"
#include "rmf/philox.hpp"
#include "rmf/simd/kernels.hpp"

namespace rmf {

std::string_view model_name(Model model) {
  return model == Model::kSteinhaus ? "steinhaus" : "rademacher";
}

Model parse_model(std::string_view name) {
  if (name == "steinhaus") return Model::kSteinhaus;
  if (name == "rademacher") return Model::kRademacher;
  throw std::invalid_argument("unknown model: " + std::string(name));
}

namespace {

PhiloxCounter prime_block(const ModelSample& s, std::uint32_t p) {
  return philox4x32_10(
      {p, 0u, static_cast<std::uint32_t>(s.sample_index),
       static_cast<std::uint32_t>(s.sample_index >> 32)},
      {static_cast<std::uint32_t>(s.seed),
       static_cast<std::uint32_t>(s.seed >> 32)});
}

}  // namespace

std::uint64_t ModelSample::prime_phase(std::uint32_t p) const {
  const PhiloxCounter out = prime_block(*this, p);
  return (std::uint64_t{out[1]} << 32) | out[0];
}

int ModelSample::prime_sign(std::uint32_t p) const {
  return (prime_block(*this, p)[2] >> 31) != 0 ? -1 : 1;
}

std::complex<double> ModelSample::prime_value(std::uint32_t p) const {
  return model == Model::kSteinhaus ? unit_phase(prime_phase(p))
                                    : std::complex<double>(prime_sign(p), 0.0);
}

std::complex<double> f_value(const ModelSample& sample, const SieveTable& table,
                             std::uint64_t n) {
  const Factorization fac = table.factorize(n);
  if (sample.model == Model::kSteinhaus) {
    std::uint64_t phase = 0;
    for (const auto& [p, e] : fac) phase += e * sample.prime_phase(p);
    return unit_phase(phase);
  }
  int sign = 1;
  for (const auto& [p, e] : fac) {
    if (e > 1) return {0.0, 0.0};
    sign *= sample.prime_sign(p);
  }
  return {static_cast<double>(sign), 0.0};
}

PreparedSet::PreparedSet(const SieveTable& table, const WeightedSet& set)
    : set_(&set) {
  std::vector<Factorization> facs;
  facs.reserve(set.size());
  for (const std::uint64_t n : set.support()) {
    facs.push_back(table.factorize(n));
    for (const auto& pe : facs.back()) primes_.push_back(pe.prime);
  }
  std::sort(primes_.begin(), primes_.end());
  primes_.erase(std::unique(primes_.begin(), primes_.end()), primes_.end());

  offsets_.push_back(0);
  for (const Factorization& fac : facs) {
    for (const auto& [p, e] : fac) {
      prime_index_.push_back(static_cast<std::uint32_t>(
          std::lower_bound(primes_.begin(), primes_.end(), p) -
          primes_.begin()));
      exponent_.push_back(e);
    }
    offsets_.push_back(static_cast<std::uint32_t>(prime_index_.size()));
    largest_.push_back(fac.empty() ? npos : prime_index_.back());
  }
  w_re_.resize(set.size());
  w_im_.resize(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    w_re_[i] = set.weight(i).real();
    w_im_[i] = set.weight(i).imag();
  }
}

void PreparedSet::evaluate(const ModelSample& sample, std::vector<double>& re,
                           std::vector<double>& im) const {
  const std::size_t n = size();
  re.resize(n);
  im.resize(n);
  if (sample.model == Model::kSteinhaus) {
    std::vector<std::uint64_t> phase(primes_.size());
    for (std::size_t k = 0; k < primes_.size(); ++k) {
      phase[k] = sample.prime_phase(primes_[k]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t total = 0;
      for (std::uint32_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
        total += exponent_[t] * phase[prime_index_[t]];
      }
      const auto z = unit_phase(total);
      re[i] = z.real();
      im[i] = z.imag();
    }
    return;
  }
  std::vector<int> sign(primes_.size());
  for (std::size_t k = 0; k < primes_.size(); ++k) {
    sign[k] = sample.prime_sign(primes_[k]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    int v = 1;
    for (std::uint32_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
      if (exponent_[t] > 1) {
        v = 0;
        break;
      }
      v *= sign[prime_index_[t]];
    }
    re[i] = v;
    im[i] = 0.0;
  }
}

std::complex<double> PreparedSet::normalized_sum(
    const ModelSample& sample) const {
  std::vector<double> re, im;
  evaluate(sample, re, im);
  const simd::ComplexSum s = simd::weighted_sum(w_re_, w_im_, re, im);
  const double scale = 1.0 / std::sqrt(set_->variance());
  return {s.re * scale, s.im * scale};
}

std::complex<double> normalized_sum(const ModelSample& sample,
                                    const WeightedSet& set,
                                    const SieveTable& table) {
  if (set.empty()) throw PreconditionError("normalized sum over empty set");
  return PreparedSet(table, set).normalized_sum(sample);
}

std::map<std::uint32_t, std::complex<double>> martingale_components(
    const ModelSample& sample, const WeightedSet& set,
    const SieveTable& table) {
  if (set.empty()) throw PreconditionError("martingale components of empty set");
  if (set.min_element() < 2) {
    throw PreconditionError("martingale components need elements >= 2");
  }
  const PreparedSet prepared(table, set);
  std::vector<double> re, im;
  prepared.evaluate(sample, re, im);
  const double scale = 1.0 / std::sqrt(set.variance());
  std::map<std::uint32_t, std::complex<double>> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::uint32_t p = prepared.primes()[prepared.largest_prime_index(i)];
    out[p] += set.weight(i) * std::complex<double>(re[i], im[i]);
  }
  for (auto& [p, z] : out) z *= scale;
  return out;
}

SampleBatch sample_batch(Model model, const WeightedSet& set,
                         const SieveTable& table, std::uint64_t count,
                         std::uint64_t seed, unsigned threads) {
  if (count == 0) throw PreconditionError("sample count must be >= 1");
  if (set.empty()) throw PreconditionError("cannot sample over an empty set");
  SampleBatch batch;
  batch.model = model;
  batch.seed = seed;
  batch.set_label = set.label();
  batch.variance = set.variance();
  batch.values.resize(count);

  const PreparedSet prepared(table, set);
  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads, 1, count));
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      batch.values[i] = prepared.normalized_sum({model, seed, i});
    }
  };
  if (workers == 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back(work, count * t / workers, count * (t + 1) / workers);
    }
  }
  return batch;
}

}  // namespace rmf
