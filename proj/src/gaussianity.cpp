#include "rmf/gaussianity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmf/energy.hpp"
#include "rmf/errors.hpp"
#include "rmf/simd/kernels.hpp"
#include "simd/lanes.hpp"

namespace rmf {

using simd::detail::LaneAccumulator;

std::vector<TPoint> default_t_grid() {
  constexpr double kTicks[] = {-2.0, -1.5, -1.0, -0.5, 0.0,
                               0.5,  1.0,  1.5,  2.0};
  std::vector<TPoint> grid;
  for (const double t1 : kTicks) {
    for (const double t2 : kTicks) grid.emplace_back(t1, t2);
  }
  return grid;
}

double complex_normal_char_fn(double t1, double t2) {
  const double t_sq = (t1 * t1 + t2 * t2) / 2.0;
  return std::exp(-t_sq / 2.0);
}

CharFnReport empirical_char_fn(const SampleBatch& batch,
                               std::span<const TPoint> points) {
  if (batch.values.empty()) throw PreconditionError("empty sample batch");
  const double m = static_cast<double>(batch.size());
  CharFnReport report;
  report.real_target = batch.model == Model::kRademacher;
  for (const auto& [t1, t2] : points) {
    LaneAccumulator re, im;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const double arg = t1 * batch.values[j].real() + t2 * batch.values[j].imag();
      re.add(j, std::cos(arg));
      im.add(j, std::sin(arg));
    }
    CharFnPoint pt;
    pt.t1 = t1;
    pt.t2 = t2;
    pt.empirical = {re.reduce() / m, im.reduce() / m};
    pt.target = report.real_target ? std::exp(-t1 * t1 / 2.0)
                                   : complex_normal_char_fn(t1, t2);
    pt.deviation = std::abs(pt.empirical - pt.target);
    pt.std_error = 1.0 / std::sqrt(m);
    report.max_deviation = std::max(report.max_deviation, pt.deviation);
    report.points.push_back(pt);
  }
  return report;
}

EpsilonCertificate epsilon_certificate(const WeightedSet& a,
                                       const WeightedSet& s,
                                       const SieveTable& table) {
  if (a.empty()) throw PreconditionError("epsilon certificate needs nonempty A");
  std::vector<bool> in_s(a.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t j = a.index_of(s[i]);
    if (j == a.size()) {
      throw PreconditionError("S is not a subset of A: " + std::to_string(s[i]));
    }
    if (s.weight(i) != a.weight(j)) {
      throw PreconditionError("S and A disagree on the weight of " +
                              std::to_string(s[i]));
    }
    in_s[j] = true;
  }

  EpsilonCertificate cert;
  cert.variance = a.variance();
  LaneAccumulator outside;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!in_s[j]) outside.add(j, std::norm(a.weight(j)));
  }
  cert.outside_mass = outside.reduce();

  const double v = cert.variance;
  cert.eps1 = std::sqrt(cert.outside_mass / v);
  if (!s.empty()) {
    const ConditionSums sums = condition_sums(table, s);
    cert.cond2 = sums.cond2;
    cert.cond3 = sums.cond3;
    cert.cond2_count = sums.cond2_count;
    cert.cond3_count = sums.cond3_count;
    // Integer counts avoid rounding when the weights are all 1.
    const double c2 = sums.cond2_count ? static_cast<double>(*sums.cond2_count)
                                       : std::abs(sums.cond2);
    const double c3 = sums.cond3_count ? static_cast<double>(*sums.cond3_count)
                                       : std::abs(sums.cond3);
    cert.eps2 = std::sqrt(c2 / (v * v));
    cert.eps3 = std::pow(c3 / (v * v), 0.25);
  }
  cert.eps = std::max({cert.eps1, cert.eps2, cert.eps3});
  return cert;
}

MomentReport moment_report(const SampleBatch& batch,
                           std::optional<std::uint64_t> exact_fourth) {
  if (batch.values.empty()) throw PreconditionError("empty sample batch");
  const std::size_t n = batch.size();
  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    re[j] = batch.values[j].real();
    im[j] = batch.values[j].imag();
  }
  const simd::PowerSums sums = simd::power_sums(re, im);
  const double m = static_cast<double>(n);

  MomentReport r;
  r.samples = n;
  r.mean_abs2 = sums.abs2 / m;
  r.mean_abs4 = sums.abs4 / m;
  r.mean_sq = {sums.sq_re / m, sums.sq_im / m};

  LaneAccumulator dev2, dev4;
  for (std::size_t j = 0; j < n; ++j) {
    const double a2 = re[j] * re[j] + im[j] * im[j];
    const double d2 = a2 - r.mean_abs2;
    const double d4 = a2 * a2 - r.mean_abs4;
    dev2.add(j, d2 * d2);
    dev4.add(j, d4 * d4);
  }
  const double denom = n > 1 ? m - 1.0 : 1.0;
  r.se_abs2 = std::sqrt(dev2.reduce() / denom / m);
  r.se_abs4 = std::sqrt(dev4.reduce() / denom / m);

  if (batch.model == Model::kSteinhaus) {
    r.reference_abs2 = 1.0;
    r.reference_abs4 = 2.0;
    r.reference_sq = 0.0;
  } else {
    r.reference_abs2 = 1.0;
    r.reference_abs4 = 3.0;
    r.reference_sq = 1.0;
  }
  if (exact_fourth) {
    const double v = batch.variance;
    r.exact_abs4 = static_cast<double>(*exact_fourth) / (v * v);
    r.ratio = r.mean_abs4 / *r.exact_abs4;
    r.ratio_se = r.se_abs4 / *r.exact_abs4;
  }
  return r;
}

double ks_statistic(std::span<const double> values, double target_std) {
  if (values.size() < 2) throw PreconditionError("KS needs at least 2 values");
  if (!(target_std > 0.0)) throw PreconditionError("target std must be > 0");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf =
        0.5 * std::erfc(-sorted[i] / (target_std * std::numbers::sqrt2));
    d = std::max({d, static_cast<double>(i + 1) / n - cdf,
                  cdf - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_pvalue(double statistic, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

MartingaleAccumulator::MartingaleAccumulator(std::size_t length, double t)
    : length_(length), t_(t) {
  if (length == 0) throw PreconditionError("martingale length must be >= 1");
}

void MartingaleAccumulator::add(std::span<const double> sequence) {
  if (sequence.size() != length_) {
    throw PreconditionError("ragged martingale input: expected length " +
                            std::to_string(length_) + ", got " +
                            std::to_string(sequence.size()));
  }
  LaneAccumulator sum, squares, fourth;
  for (std::size_t n = 0; n < length_; ++n) {
    const double x = sequence[n];
    const double x2 = x * x;
    sum.add(n, x);
    squares.add(n, x2);
    fourth.add(n, x2 * x2);
  }
  const double excess = squares.reduce() - 1.0;
  const double phase = t_ * sum.reduce();
  fourth_.push_back(fourth.reduce());
  concentration_.push_back(excess * excess);
  cos_.push_back(std::cos(phase));
  sin_.push_back(std::sin(phase));
  ++count_;
}

MartingaleReport MartingaleAccumulator::finish() const {
  if (count_ == 0) throw PreconditionError("no martingale sequences supplied");
  const auto mean = [&](const std::vector<double>& v) {
    LaneAccumulator acc;
    for (std::size_t j = 0; j < v.size(); ++j) acc.add(j, v[j]);
    return acc.reduce() / static_cast<double>(v.size());
  };
  MartingaleReport r;
  r.sequences = count_;
  r.length = length_;
  r.t = t_;
  r.sum_fourth = mean(fourth_);
  r.variance_concentration = mean(concentration_);
  r.phi_hat = {mean(cos_), mean(sin_)};
  r.target = std::exp(-t_ * t_ / 2.0);
  r.deviation = std::abs(r.phi_hat - r.target);
  const double growth = std::exp(t_ * t_);
  r.fourth_term = growth * std::pow(r.sum_fourth, 0.25);
  r.variance_term = growth * std::sqrt(r.variance_concentration);
  const double bound = r.fourth_term + r.variance_term;
  r.ratio = bound > 0.0 ? r.deviation / bound
                        : (r.deviation > 0.0 ? INFINITY : 0.0);
  return r;
}

MartingaleReport martingale_bound_check(
    const std::vector<std::vector<double>>& sequences, double t) {
  if (sequences.empty()) throw PreconditionError("no martingale sequences");
  MartingaleAccumulator acc(sequences.front().size(), t);
  for (const auto& seq : sequences) acc.add(seq);
  return acc.finish();
}

std::pair<std::vector<double>, double> project_components(
    std::span<const std::complex<double>> components, double t1, double t2) {
  const double t = std::sqrt((t1 * t1 + t2 * t2) / 2.0);
  const double radius = std::hypot(t1, t2);
  const std::complex<double> rotate =
      radius > 0.0 ? std::complex<double>(t1 / radius, -t2 / radius)
                   : std::complex<double>(1.0, 0.0);
  std::vector<double> x;
  x.reserve(components.size());
  for (const auto& z : components) {
    x.push_back(std::numbers::sqrt2 * (rotate * z).real());
  }
  return {std::move(x), t};
}

}  // namespace rmf
