#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rmf/sampler.hpp"
#include "rmf/sets.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

using TPoint = std::pair<double, double>;

// {0, +-0.5, +-1, +-1.5, +-2}^2, row-major in t1 then t2.
std::vector<TPoint> default_t_grid();

// Characteristic function of the standard complex normal, e^{-t^2/2} with
// t^2 = (t1^2 + t2^2)/2.
double complex_normal_char_fn(double t1, double t2);

struct CharFnPoint {
  double t1 = 0.0;
  double t2 = 0.0;
  std::complex<double> empirical;
  double target = 0.0;
  double deviation = 0.0;  // |empirical - target|
  double std_error = 0.0;  // M^{-1/2}
};

struct CharFnReport {
  // Steinhaus batches are compared with the complex normal; Rademacher
  // batches (real valued) with the real normal e^{-t1^2/2}.
  bool real_target = false;
  std::vector<CharFnPoint> points;
  double max_deviation = 0.0;
};

// Throws PreconditionError for an empty batch.
CharFnReport empirical_char_fn(const SampleBatch& batch,
                               std::span<const TPoint> points);

struct EpsilonCertificate {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  double eps = 0.0;
  double variance = 0.0;
  double outside_mass = 0.0;  // sum over A \ S of |a_n|^2
  std::complex<double> cond2;
  std::complex<double> cond3;
  std::optional<std::int64_t> cond2_count;
  std::optional<std::int64_t> cond3_count;
};

// Throws PreconditionError unless S is a subset of A carrying A's weights,
// with every element of S at least 2.
EpsilonCertificate epsilon_certificate(const WeightedSet& a,
                                       const WeightedSet& s,
                                       const SieveTable& table);

struct MomentReport {
  std::uint64_t samples = 0;
  double mean_abs2 = 0.0, se_abs2 = 0.0;
  double mean_abs4 = 0.0, se_abs4 = 0.0;
  std::complex<double> mean_sq;  // E[Z^2]
  // Normal reference: complex (1, 2, 0) for Steinhaus, real (1, 3, 1) for
  // Rademacher.
  double reference_abs2 = 0.0;
  double reference_abs4 = 0.0;
  double reference_sq = 0.0;
  // Present when an exact fourth moment of the unnormalized sum was given.
  std::optional<double> exact_abs4;  // exact_fourth / V^2
  std::optional<double> ratio;       // mean_abs4 / exact_abs4
  std::optional<double> ratio_se;
};

MomentReport moment_report(const SampleBatch& batch,
                           std::optional<std::uint64_t> exact_fourth = {});

// sup |F_n(x) - Phi(x / target_std)|. Throws PreconditionError for fewer
// than two values.
double ks_statistic(std::span<const double> values, double target_std);

// Asymptotic Kolmogorov tail probability for a statistic from n samples.
double kolmogorov_pvalue(double statistic, std::size_t n);

struct MartingaleReport {
  std::uint64_t sequences = 0;
  std::size_t length = 0;
  double t = 0.0;
  double sum_fourth = 0.0;              // sum_n E[X_n^4]
  double variance_concentration = 0.0;  // E[(sum_n X_n^2 - 1)^2]
  std::complex<double> phi_hat;         // E[e^{i t S_N}]
  double target = 0.0;                  // e^{-t^2/2}
  double deviation = 0.0;
  double fourth_term = 0.0;    // e^{t^2} (sum_fourth)^{1/4}
  double variance_term = 0.0;  // e^{t^2} (variance_concentration)^{1/2}
  double ratio = 0.0;          // deviation / (fourth_term + variance_term)
};

// Streams realized martingale difference sequences of a fixed length.
class MartingaleAccumulator {
 public:
  MartingaleAccumulator(std::size_t length, double t);
  // Throws PreconditionError if the sequence has the wrong length.
  void add(std::span<const double> sequence);
  MartingaleReport finish() const;

 private:
  std::size_t length_;
  double t_;
  std::uint64_t count_ = 0;
  std::vector<double> fourth_, concentration_, cos_, sin_;
};

// Throws PreconditionError for no sequences or ragged input.
MartingaleReport martingale_bound_check(
    const std::vector<std::vector<double>>& sequences, double t);

// Real projection of complex differences: X_p = sqrt(2) Re(e^{-i phi} Z_p)
// with (t1 + i t2)/2 = t e^{i phi}/sqrt(2), so that t sum X_p equals
// t1 Re(sum Z_p) + t2 Im(sum Z_p). Returns (X, t).
std::pair<std::vector<double>, double> project_components(
    std::span<const std::complex<double>> components, double t1, double t2);

}  // namespace rmf
