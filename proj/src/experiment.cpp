#include "rmf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rmf/energy.hpp"
#include "rmf/errors.hpp"
#include "rmf/theta.hpp"

namespace rmf {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw PreconditionError("config key '" + key + "': cannot read '" + value +
                          "' as " + expected);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    bad_value(key, value, "a finite number");
  }
  return v;
}

// Integers may be written in scientific notation ("1e6") when exact.
std::int64_t parse_i64(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, v);
  if (res.ec == std::errc() && res.ptr == end) return v;
  const double d = parse_double(key, value);
  if (d != std::floor(d) || std::fabs(d) > 9.007199254740992e15) {
    bad_value(key, value, "an integer");
  }
  return static_cast<std::int64_t>(d);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (!value.empty() && value.front() == '-') {
    bad_value(key, value, "a non-negative integer");
  }
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, v);
  if (res.ec == std::errc() && res.ptr == end) return v;
  const std::int64_t s = parse_i64(key, value);
  if (s < 0) bad_value(key, value, "a non-negative integer");
  return static_cast<std::uint64_t>(s);
}

SetFamily parse_family(const std::string& value) {
  if (value == "interval") return SetFamily::kInterval;
  if (value == "two_squares") return SetFamily::kTwoSquares;
  if (value == "shifted_primes") return SetFamily::kShiftedPrimes;
  if (value == "twisted") return SetFamily::kTwisted;
  if (value == "list") return SetFamily::kList;
  bad_value("set", value,
            "one of interval, two_squares, shifted_primes, twisted, list");
}

std::string family_name(SetFamily f) {
  switch (f) {
    case SetFamily::kInterval: return "interval";
    case SetFamily::kTwoSquares: return "two_squares";
    case SetFamily::kShiftedPrimes: return "shifted_primes";
    case SetFamily::kTwisted: return "twisted";
    case SetFamily::kList: return "list";
  }
  return "?";
}

FilterKind parse_filter(const std::string& value) {
  if (value == "none") return FilterKind::kNone;
  if (value == "typical") return FilterKind::kTypical;
  if (value == "two_squares_typical") return FilterKind::kTwoSquaresTypical;
  if (value == "squarefree") return FilterKind::kSquarefree;
  bad_value("filter", value,
            "one of none, typical, two_squares_typical, squarefree");
}

std::string filter_name(FilterKind f) {
  switch (f) {
    case FilterKind::kNone: return "none";
    case FilterKind::kTypical: return "typical";
    case FilterKind::kTwoSquaresTypical: return "two_squares_typical";
    case FilterKind::kSquarefree: return "squarefree";
  }
  return "?";
}

// "default" or "t1:t2,t1:t2,...".
std::vector<TPoint> parse_t_grid(const std::string& value) {
  if (value == "default") return {};
  std::vector<TPoint> grid;
  for (const auto& item : split(value, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) bad_value("t-grid", value, "t1:t2 pairs");
    grid.emplace_back(parse_double("t-grid", parts[0]),
                      parse_double("t-grid", parts[1]));
  }
  return grid;
}

// The scale x entering log log x in the formula defaults.
double scale_of(const ExperimentConfig& c) {
  if (c.family == SetFamily::kList) {
    return c.elements.empty()
               ? 0.0
               : static_cast<double>(
                     *std::max_element(c.elements.begin(), c.elements.end()));
  }
  return static_cast<double>(c.x);
}

double loglog(double x) { return x > 1.0 ? std::log(std::log(x)) : -INFINITY; }

std::string describe_family(const ExperimentConfig& c) {
  switch (c.family) {
    case SetFamily::kInterval:
      return "interval_set(x=" + std::to_string(c.x) +
             ", y=" + std::to_string(c.y) + ")";
    case SetFamily::kTwoSquares:
      return "two_squares_set(x=" + std::to_string(c.x) +
             ", y=" + std::to_string(c.y) + ")";
    case SetFamily::kShiftedPrimes:
      return "shifted_primes_set(N=" + std::to_string(c.x) +
             ", k=" + std::to_string(c.shift_k) + ")";
    case SetFamily::kTwisted:
      return "twisted_weights(N=" + std::to_string(c.x) + ", " + c.theta + ")";
    case SetFamily::kList:
      return "list";
  }
  return "?";
}

void require_nonempty(const WeightedSet& set, const std::string& producer) {
  if (set.empty()) {
    throw PreconditionError(producer + " produced an empty set");
  }
}

void write_text_file(const std::string& path,
                     const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  body(out);
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file " + path.string());
  ConfigMap values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError(path.string() + ":" + std::to_string(number) +
                              ": expected key = value");
    }
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) {
      throw PreconditionError(path.string() + ":" + std::to_string(number) +
                              ": empty key");
    }
    if (!values.emplace(key, std::move(value)).second) {
      throw PreconditionError(path.string() + ":" + std::to_string(number) +
                              ": key '" + key + "' repeated");
    }
  }
  return values;
}

ExperimentConfig parse_config(const ConfigMap& values) {
  ExperimentConfig c;
  for (const auto& [key, value] : values) {
    if (key == "sieve-limit") {
      c.sieve_limit = parse_u64(key, value);
    } else if (key == "sieve-cache") {
      c.sieve_cache = value;
    } else if (key == "set") {
      c.family = parse_family(value);
    } else if (key == "x") {
      c.x = parse_u64(key, value);
    } else if (key == "y") {
      c.y = parse_u64(key, value);
    } else if (key == "shift-k") {
      c.shift_k = parse_i64(key, value);
    } else if (key == "theta") {
      c.theta = value;
    } else if (key == "elements") {
      c.elements.clear();
      for (const auto& item : split(value, ',')) {
        c.elements.push_back(parse_u64(key, item));
      }
    } else if (key == "rho") {
      if (value == "loglog") {
        c.rho_loglog = true;
        c.rho.reset();
      } else {
        c.rho_loglog = false;
        c.rho = parse_double(key, value);
      }
    } else if (key == "filter") {
      c.filter = parse_filter(value);
    } else if (key == "epsilon") {
      c.epsilon = parse_double(key, value);
    } else if (key == "omega-cap") {
      c.omega_cap = static_cast<std::uint32_t>(
          std::min<std::uint64_t>(parse_u64(key, value), UINT32_MAX));
    } else if (key == "k-min") {
      c.k_min = static_cast<int>(parse_i64(key, value));
    } else if (key == "k-max") {
      c.k_max = static_cast<int>(parse_i64(key, value));
    } else if (key == "model") {
      try {
        c.model = parse_model(value);
      } catch (const std::invalid_argument&) {
        bad_value(key, value, "steinhaus or rademacher");
      }
    } else if (key == "samples") {
      c.samples = parse_u64(key, value);
    } else if (key == "seed") {
      c.seed = parse_u64(key, value);
    } else if (key == "t-grid") {
      c.t_grid = parse_t_grid(value);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(
          std::min<std::uint64_t>(parse_u64(key, value), 4096));
    } else if (key == "offdiagonal-cap") {
      c.offdiagonal_cap = parse_u64(key, value);
    } else if (key == "product-ks") {
      c.product_ks.clear();
      for (const auto& item : split(value, ',')) {
        c.product_ks.push_back(static_cast<int>(parse_i64(key, item)));
      }
    } else if (key == "out") {
      c.out = value;
    } else if (key == "csv") {
      c.csv = value;
    } else if (key == "columns") {
      c.columns = value;
    } else {
      throw PreconditionError("unknown config key '" + key + "'");
    }
  }
  return c;
}

ResolvedConfig resolve(const ExperimentConfig& config, bool need_samples) {
  ResolvedConfig r;
  r.config = config;
  const ExperimentConfig& c = r.config;

  if (need_samples && c.samples == 0) {
    throw PreconditionError("sample count M must be at least 1");
  }
  if ((need_samples || c.rho || c.rho_loglog) && !c.seed) {
    throw PreconditionError("a seed is required (no implicit randomness)");
  }
  if (c.threads == 0) throw PreconditionError("threads must be at least 1");
  if (!(c.epsilon >= 0.0)) throw PreconditionError("epsilon must be >= 0");
  for (const int k : c.product_ks) {
    if (k < 1 || k > 3) throw PreconditionError("product-ks must be 1, 2 or 3");
  }

  // Largest integer the sieve has to cover.
  std::uint64_t needed = 2;
  switch (c.family) {
    case SetFamily::kInterval:
    case SetFamily::kTwoSquares:
      if (c.x == 0) throw PreconditionError(family_name(c.family) + " needs x >= 1");
      if (c.y > UINT64_MAX - c.x) throw RangeError("x + y overflows");
      needed = c.x + c.y;
      break;
    case SetFamily::kShiftedPrimes: {
      if (c.x < 2) throw PreconditionError("shifted_primes needs x (= N) >= 2");
      if (c.shift_k == 0) throw PreconditionError("shifted_primes needs shift-k != 0");
      const __int128 hi = static_cast<__int128>(c.x) - c.shift_k;
      if (hi > static_cast<__int128>(SieveTable::kMaxLimit)) {
        throw RangeError("shifted_primes needs primes beyond the largest sieve");
      }
      needed = std::max<std::uint64_t>(c.x, static_cast<std::uint64_t>(
                                                std::max<__int128>(hi, 2)));
      break;
    }
    case SetFamily::kTwisted:
      if (c.x == 0) throw PreconditionError("twisted needs x (= N) >= 1");
      if (c.theta.empty()) throw PreconditionError("twisted needs theta");
      Theta::parse(c.theta);
      needed = c.x;
      break;
    case SetFamily::kList:
      if (c.elements.empty()) throw PreconditionError("list needs elements");
      needed = *std::max_element(c.elements.begin(), c.elements.end());
      break;
  }
  needed = std::max<std::uint64_t>(needed, 2);
  r.sieve_limit = c.sieve_limit.value_or(needed);
  if (r.sieve_limit < 2 || r.sieve_limit > SieveTable::kMaxLimit) {
    throw RangeError("sieve limit must lie in [2, 2^31]");
  }
  if (needed > r.sieve_limit) {
    throw RangeError(describe_family(c) + " references " +
                     std::to_string(needed) + ", beyond sieve limit " +
                     std::to_string(r.sieve_limit));
  }

  const double x = scale_of(c);
  if (c.rho) {
    if (!(*c.rho > 0.0 && *c.rho <= 1.0)) {
      throw PreconditionError("rho must lie in (0, 1]");
    }
    r.rho = c.rho;
  } else if (c.rho_loglog) {
    const double ll = loglog(x);
    r.rho = ll > 1.0 ? std::pow(ll, -5.0) : 1.0;
  }

  if (c.filter == FilterKind::kTypical) {
    if (c.omega_cap) {
      r.omega_cap = c.omega_cap;
    } else {
      const double k = std::ceil((1.0 + c.epsilon) * loglog(x));
      r.omega_cap = k > 0.0 ? static_cast<std::uint32_t>(k) : 0;
    }
  }
  if (c.filter == FilterKind::kTwoSquaresTypical) {
    std::pair<int, int> range{0, 0};
    if (!c.k_min || !c.k_max) {
      if (c.y == 0 || (c.family != SetFamily::kInterval &&
                       c.family != SetFamily::kTwoSquares)) {
        throw PreconditionError(
            "two_squares_typical needs k-min and k-max unless the set has "
            "x and y");
      }
      // 1/delta <= e^{e^k} <= x with delta = y/x.
      range = double_exponential_range(x / static_cast<double>(c.y), x);
    }
    if (c.k_min) range.first = *c.k_min;
    if (c.k_max) range.second = *c.k_max;
    if (range.first < 1 || range.first > range.second) {
      throw PreconditionError("k range [" + std::to_string(range.first) + ", " +
                              std::to_string(range.second) +
                              "] is empty; set k-min and k-max");
    }
    r.k_range = range;
  }

  for (const auto& [t1, t2] : c.t_grid) {
    if (!std::isfinite(t1) || !std::isfinite(t2)) {
      throw PreconditionError("t-grid entries must be finite");
    }
  }
  return r;
}

Json config_json(const ResolvedConfig& r) {
  const ExperimentConfig& c = r.config;
  Json doc;
  doc["sieve_limit"] = r.sieve_limit;
  if (!c.sieve_cache.empty()) doc["sieve_cache"] = c.sieve_cache;
  doc["set"] = family_name(c.family);
  switch (c.family) {
    case SetFamily::kInterval:
    case SetFamily::kTwoSquares:
      doc["x"] = c.x;
      doc["y"] = c.y;
      break;
    case SetFamily::kShiftedPrimes:
      doc["x"] = c.x;
      doc["shift_k"] = c.shift_k;
      break;
    case SetFamily::kTwisted:
      doc["x"] = c.x;
      doc["theta"] = Theta::parse(c.theta).spec();
      break;
    case SetFamily::kList:
      doc["elements"] = c.elements;
      break;
  }
  doc["rho"] = r.rho ? Json(*r.rho) : Json(nullptr);
  if (c.rho_loglog) doc["rho_source"] = "(log log x)^-5";
  doc["filter"] = filter_name(c.filter);
  doc["epsilon"] = c.epsilon;
  if (r.omega_cap) {
    doc["omega_cap"] = *r.omega_cap;
    doc["omega_cap_source"] =
        c.omega_cap ? "given" : "ceil((1+epsilon) log log x)";
  }
  if (r.k_range) {
    doc["k_min"] = r.k_range->first;
    doc["k_max"] = r.k_range->second;
    doc["k_range_source"] = (c.k_min && c.k_max)
                                ? "given"
                                : "1/delta <= e^(e^k) <= x, delta = y/x";
  }
  doc["model"] = std::string(model_name(c.model));
  doc["samples"] = c.samples;
  doc["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  Json grid = Json::array();
  for (const auto& [t1, t2] : c.t_grid.empty() ? default_t_grid() : c.t_grid) {
    grid.push_back(Json::array({t1, t2}));
  }
  doc["t_grid"] = std::move(grid);
  doc["offdiagonal_cap"] = c.offdiagonal_cap;
  doc["product_ks"] = c.product_ks;
  return doc;
}

SieveTable obtain_sieve(const ResolvedConfig& r) {
  const std::string& path = r.config.sieve_cache;
  if (path.empty()) return SieveTable(r.sieve_limit);
  if (!std::filesystem::exists(path)) {
    SieveTable table(r.sieve_limit);
    save_sieve(table, path);
    return table;
  }
  SieveTable table = load_sieve(path);
  if (table.limit() < r.sieve_limit) {
    throw RangeError("sieve cache " + path + " covers only up to " +
                     std::to_string(table.limit()));
  }
  return table;
}

ExperimentSets construct_sets(const ResolvedConfig& r,
                              const SieveTable& table) {
  const ExperimentConfig& c = r.config;
  ExperimentSets sets;
  switch (c.family) {
    case SetFamily::kInterval:
      sets.base = interval_set(table, c.x, c.y);
      break;
    case SetFamily::kTwoSquares:
      sets.base = two_squares_set(table, c.x, c.y);
      break;
    case SetFamily::kShiftedPrimes:
      sets.base = shifted_primes_set(table, c.x, c.shift_k);
      break;
    case SetFamily::kTwisted:
      sets.base = twisted_weights(c.x, Theta::parse(c.theta));
      break;
    case SetFamily::kList: {
      auto elements = c.elements;
      std::sort(elements.begin(), elements.end());
      elements.erase(std::unique(elements.begin(), elements.end()),
                     elements.end());
      sets.base = WeightedSet::indicator(std::move(elements), "list");
      break;
    }
  }
  require_nonempty(sets.base, describe_family(c));

  sets.a = r.rho ? random_thin(sets.base, *r.rho, *c.seed) : sets.base;
  require_nonempty(sets.a, "random_thin");

  switch (c.filter) {
    case FilterKind::kNone:
      sets.s = sets.a;
      break;
    case FilterKind::kTypical:
      sets.s = typical_filter(table, sets.a, *r.omega_cap);
      break;
    case FilterKind::kTwoSquaresTypical:
      sets.s = two_squares_typical_filter(table, sets.a, c.epsilon,
                                          r.k_range->first, r.k_range->second);
      break;
    case FilterKind::kSquarefree:
      sets.s = squarefree_filter(table, sets.a);
      break;
  }
  require_nonempty(sets.s, filter_name(c.filter) + " filter");
  return sets;
}

Json set_summary(const ExperimentSets& sets) {
  const auto one = [](const WeightedSet& s) {
    return Json{{"label", s.label()},
                {"size", s.size()},
                {"V", s.variance()},
                {"min", s.min_element()},
                {"max", s.max_element()},
                {"indicator", s.is_indicator()}};
  };
  return Json{{"base", one(sets.base)}, {"A", one(sets.a)}, {"S", one(sets.s)}};
}

std::optional<std::uint64_t> exact_fourth_moment(Model model,
                                                 const WeightedSet& a,
                                                 const SieveTable& table,
                                                 const EnergyReport* known) {
  if (!a.is_indicator()) return std::nullopt;
  if (model == Model::kSteinhaus) {
    return known ? known->e_times : multiplicative_energy(a);
  }
  // f vanishes off the square-free integers.
  const WeightedSet t = squarefree_filter(table, a);
  if (t.empty()) return 0;
  if (t.size() == a.size() && known && known->e_square) return known->e_square;
  return square_energy(table, t);
}

Json batch_statistics(const ResolvedConfig& r, const SampleBatch& batch,
                      std::optional<std::uint64_t> exact_fourth,
                      CharFnReport* char_fn_out) {
  Json doc;
  doc["moments"] = to_json(moment_report(batch, exact_fourth));

  Json ks = Json::object();
  if (batch.size() >= 2) {
    const auto add = [&](const char* name, std::vector<double> values) {
      const double d = ks_statistic(values, 1.0);
      ks[name] = {{"statistic", d},
                  {"p_value", kolmogorov_pvalue(d, values.size())}};
    };
    std::vector<double> re(batch.size()), im(batch.size());
    if (batch.model == Model::kSteinhaus) {
      for (std::size_t i = 0; i < batch.size(); ++i) {
        re[i] = std::numbers::sqrt2 * batch.values[i].real();
        im[i] = std::numbers::sqrt2 * batch.values[i].imag();
      }
      add("sqrt2_re", std::move(re));
      add("sqrt2_im", std::move(im));
    } else {
      for (std::size_t i = 0; i < batch.size(); ++i) {
        re[i] = batch.values[i].real();
      }
      add("re", std::move(re));
    }
  }
  doc["ks"] = std::move(ks);

  const auto grid =
      r.config.t_grid.empty() ? default_t_grid() : r.config.t_grid;
  CharFnReport cf = empirical_char_fn(batch, grid);
  doc["char_fn"] = to_json(cf);
  if (char_fn_out) *char_fn_out = std::move(cf);
  return doc;
}

Json run_experiment(const ExperimentConfig& config) {
  const ResolvedConfig r = resolve(config, true);
  const ExperimentConfig& c = r.config;
  const SieveTable table = obtain_sieve(r);
  const ExperimentSets sets = construct_sets(r, table);

  Json report;
  report["schema"] = 1;
  report["command"] = "experiment";
  report["config"] = config_json(r);
  report["sets"] = set_summary(sets);

  EnergyRequest request;
  request.product_ks = c.product_ks;
  request.offdiagonal_cap = c.offdiagonal_cap;
  EnergyOptions options;
  options.threads = c.threads;
  const EnergyReport energy = energy_report(table, sets.a, request, options);
  report["energy"] = to_json(energy);

  if (sets.s.min_element() >= 2) {
    report["certificate"] = to_json(epsilon_certificate(sets.a, sets.s, table));
  } else {
    report["certificate"] = nullptr;
    report["certificate_note"] = "S contains 1";
  }

  const SampleBatch batch =
      sample_batch(c.model, sets.a, table, c.samples, *c.seed, c.threads);
  report["batch"] = {{"model", std::string(model_name(batch.model))},
                     {"seed", batch.seed},
                     {"M", batch.size()},
                     {"V", batch.variance}};
  const auto exact = exact_fourth_moment(c.model, sets.a, table, &energy);
  CharFnReport cf;
  Json stats = batch_statistics(r, batch, exact, &cf);
  for (auto& [key, value] : stats.items()) report[key] = std::move(value);

  if (!c.csv.empty()) {
    write_text_file(c.csv, [&](std::ostream& out) { write_batch_csv(batch, out); });
  }
  if (!c.columns.empty()) {
    write_text_file(c.columns,
                    [&](std::ostream& out) { write_char_fn_columns(cf, out); });
  }
  report["timestamp"] = utc_timestamp();
  return report;
}

Json build_cache(std::uint64_t limit, const std::filesystem::path& path) {
  Json doc{{"path", path.string()},
           {"limit", limit},
           {"bytes", sieve_cache_size_bytes(limit)}};
  if (std::filesystem::exists(path)) {
    const SieveTable table = load_sieve(path);
    if (table.limit() != limit) {
      throw PreconditionError("existing cache " + path.string() +
                              " holds limit " + std::to_string(table.limit()) +
                              ", not " + std::to_string(limit));
    }
    doc["status"] = "verified, skipped";
    return doc;
  }
  save_sieve(SieveTable(limit), path);
  doc["status"] = "built";
  return doc;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rmf
