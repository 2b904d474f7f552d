#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmf/gaussianity.hpp"
#include "rmf/io.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sets.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

// Flat "key = value" settings; keys are the long CLI flag names without the
// leading dashes ("sieve-limit", "shift-k", ...).
using ConfigMap = std::map<std::string, std::string>;

// Lines are "key = value"; blank lines and lines starting with '#' are
// skipped. Throws PreconditionError on malformed lines or repeated keys.
ConfigMap read_config_file(const std::filesystem::path& path);

enum class SetFamily { kInterval, kTwoSquares, kShiftedPrimes, kTwisted, kList };
enum class FilterKind { kNone, kTypical, kTwoSquaresTypical, kSquarefree };

struct ExperimentConfig {
  std::optional<std::uint64_t> sieve_limit;  // default: largest element used
  std::string sieve_cache;                   // optional cache file

  // interval, two_squares: [x, x + y]. shifted_primes: {p + shift_k <= x}.
  // twisted: {1..x} with a_n = e(n theta). list: `elements`.
  SetFamily family = SetFamily::kInterval;
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  std::int64_t shift_k = 0;
  std::string theta;
  std::vector<std::uint64_t> elements;

  // A is the family thinned by rho; S is A after the filter.
  std::optional<double> rho;
  bool rho_loglog = false;  // rho = (log log x)^-5
  FilterKind filter = FilterKind::kNone;
  double epsilon = 0.1;
  std::optional<std::uint32_t> omega_cap;  // default ceil((1+eps) log log x)
  std::optional<int> k_min, k_max;         // default from 1/delta..x, delta=y/x

  Model model = Model::kSteinhaus;
  std::uint64_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::vector<TPoint> t_grid;  // empty: default_t_grid()
  unsigned threads = 1;
  std::uint64_t offdiagonal_cap = 0;
  std::vector<int> product_ks;

  std::string out;      // JSON report path; stdout when empty
  std::string csv;      // optional batch CSV
  std::string columns;  // optional characteristic-function columns
};

// Throws PreconditionError for unknown keys or unparsable values.
ExperimentConfig parse_config(const ConfigMap& values);

// A config with every formula default filled in and checked against
// the sieve limit. Nothing expensive happens here.
struct ResolvedConfig {
  ExperimentConfig config;
  std::uint64_t sieve_limit = 0;
  std::optional<std::uint32_t> omega_cap;
  std::optional<std::pair<int, int>> k_range;
  std::optional<double> rho;
};

// Throws RangeError when a referenced integer exceeds the sieve limit and
// PreconditionError for other invalid settings.
ResolvedConfig resolve(const ExperimentConfig& config, bool need_samples);

Json config_json(const ResolvedConfig& resolved);

// Loads the configured cache (building it first if missing) or sieves in
// memory.
SieveTable obtain_sieve(const ResolvedConfig& resolved);

struct ExperimentSets {
  WeightedSet base;  // family output
  WeightedSet a;     // base after thinning
  WeightedSet s;     // a after filtering
};

// Throws PreconditionError naming the constructor or filter that produced
// an empty set.
ExperimentSets construct_sets(const ResolvedConfig& resolved,
                              const SieveTable& table);

Json set_summary(const ExperimentSets& sets);

// E|sum a_n f(n)|^4 for an indicator set: E_x(A) (Steinhaus) or E_sq of its
// square-free part (Rademacher). nullopt for weighted sets.
std::optional<std::uint64_t> exact_fourth_moment(Model model,
                                                 const WeightedSet& a,
                                                 const SieveTable& table,
                                                 const EnergyReport* known);

// Moments, KS statistics and the characteristic function of a batch.
Json batch_statistics(const ResolvedConfig& resolved, const SampleBatch& batch,
                      std::optional<std::uint64_t> exact_fourth,
                      CharFnReport* char_fn_out = nullptr);

// Full pipeline. The "timestamp" field is the only one that varies between
// runs of the same config.
Json run_experiment(const ExperimentConfig& config);

// Writes the binary sieve cache, or verifies an existing one. Throws
// CorruptDataError when an existing file is invalid.
Json build_cache(std::uint64_t limit, const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace rmf
