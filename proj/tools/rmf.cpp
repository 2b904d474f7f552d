// rmf: command-line driver for the random multiplicative function toolkit.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "rmf/diophantine.hpp"
#include "rmf/energy.hpp"
#include "rmf/errors.hpp"
#include "rmf/experiment.hpp"
#include "rmf/gaussianity.hpp"
#include "rmf/io.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sets.hpp"
#include "rmf/sieve.hpp"
#include "rmf/simd/kernels.hpp"

namespace {

using rmf::Json;

constexpr const char* kSieveMemoryNote =
    "The sieve stores one 32-bit smallest prime factor per integer, about "
    "4 bytes per integer (8 GB at the 2^31 maximum).";

// Flags shared by subcommands, keyed like the config file.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_file;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, values[key], help);
  }

  rmf::ConfigMap merged() const {
    rmf::ConfigMap out;
    if (!config_file.empty()) out = rmf::read_config_file(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out[key] = values.at(key);
    }
    return out;
  }
};

void add_set_flags(CLI::App* app, FlagSet& f) {
  f.add(app, "sieve-limit",
        std::string("Sieve limit (default: largest integer needed). ") +
            kSieveMemoryNote);
  f.add(app, "sieve-cache", "Binary sieve cache to load, created if missing");
  f.add(app, "set",
        "Set family: interval, two_squares, shifted_primes, twisted, list");
  f.add(app, "x", "Interval start; N for shifted_primes and twisted");
  f.add(app, "y", "Interval length");
  f.add(app, "shift-k", "Shift k for shifted_primes");
  f.add(app, "theta",
        "Twist: rational:p/q, quadratic:a,b,c,d ((a+b*sqrt(d))/c) or "
        "decimal:<digits>@<bits>");
  f.add(app, "elements", "Comma-separated elements for --set list");
  f.add(app, "rho", "Random thinning density, or 'loglog' for (log log x)^-5");
  f.add(app, "filter", "none, typical, two_squares_typical, squarefree");
  f.add(app, "epsilon", "Filter epsilon (default 0.1)");
  f.add(app, "omega-cap",
        "Omega bound K for the typical filter (default "
        "ceil((1+epsilon) log log x))");
  f.add(app, "k-min", "Lower k for two_squares_typical (default from delta=y/x)");
  f.add(app, "k-max", "Upper k for two_squares_typical (default from x)");
  f.add(app, "seed", "Master seed (required for any randomness)");
  f.add(app, "threads", "Worker threads; results do not depend on this");
  app->add_option("--config", f.config_file,
                  "Flat key = value file; flags override its entries");
}

void add_sampling_flags(CLI::App* app, FlagSet& f) {
  f.add(app, "model", "steinhaus or rademacher");
  f.add(app, "samples", "Number of samples M");
  f.add(app, "t-grid", "'default' or t1:t2,t1:t2,...");
  f.add(app, "csv", "Also write the batch as index,re,im CSV");
  f.add(app, "columns", "Also write characteristic-function columns");
}

void emit(const Json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream file(out);
  if (!file) throw std::runtime_error("cannot open " + out + " for writing");
  file << doc.dump(2) << '\n';
  if (!file) throw std::runtime_error("write to " + out + " failed");
  std::cerr << "wrote " << out << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void print_sets(const rmf::ExperimentSets& sets) {
  std::cerr << "base " << sets.base.label() << ": " << sets.base.size()
            << " elements\n";
  if (sets.a.size() != sets.base.size()) {
    std::cerr << "A    " << sets.a.label() << ": " << sets.a.size() << '\n';
  }
  if (sets.s.size() != sets.a.size()) {
    std::cerr << "S    " << sets.s.label() << ": " << sets.s.size() << '\n';
  }
}

void print_stats(const Json& stats) {
  const Json& m = stats["moments"];
  std::fprintf(stderr, "E|Z|^2 = %.4f +- %.4f   E|Z|^4 = %.4f +- %.4f\n",
               m["mean_abs2"].get<double>(), m["se_abs2"].get<double>(),
               m["mean_abs4"].get<double>(), m["se_abs4"].get<double>());
  if (m.contains("exact_abs4")) {
    std::fprintf(stderr, "exact E|Z|^4 = %.4f   ratio = %.4f +- %.4f\n",
                 m["exact_abs4"].get<double>(), m["ratio"].get<double>(),
                 m["ratio_se"].get<double>());
  }
  for (const auto& [name, ks] : stats["ks"].items()) {
    std::fprintf(stderr, "KS %-9s D = %.4f  p = %.3f\n", name.c_str(),
                 ks["statistic"].get<double>(), ks["p_value"].get<double>());
  }
  std::fprintf(stderr, "max |phi_hat - phi| over t-grid = %.4f\n",
               stats["char_fn"]["max_deviation"].get<double>());
}

int cmd_sieve(const FlagSet& f, const std::string& out) {
  const auto values = f.merged();
  const auto it = values.find("sieve-limit");
  if (it == values.end()) throw rmf::PreconditionError("--sieve-limit is required");
  const rmf::ExperimentConfig c = rmf::parse_config({{"sieve-limit", it->second}});
  const std::uint64_t limit = *c.sieve_limit;
  Json doc;
  if (!out.empty()) {
    doc = rmf::build_cache(limit, out);
    std::cerr << "sieve cache " << out << ": "
              << doc["status"].get<std::string>() << " ("
              << doc["bytes"].get<std::uint64_t>() << " bytes)\n";
  } else {
    const rmf::SieveTable table(limit);
    std::uint64_t primes = 0;
    for (std::uint64_t n = 2; n <= limit; ++n) primes += table.is_prime(n);
    doc = {{"limit", limit}, {"primes", primes}};
    std::cerr << "pi(" << limit << ") = " << primes << '\n';
  }
  doc["schema"] = 1;
  doc["command"] = "sieve";
  std::cout << doc.dump(2) << '\n';
  return 0;
}

int cmd_set(const FlagSet& f, const std::string& out) {
  const auto r = rmf::resolve(rmf::parse_config(f.merged()), false);
  const auto table = rmf::obtain_sieve(r);
  const auto sets = rmf::construct_sets(r, table);
  print_sets(sets);
  if (!out.empty() && ends_with(out, ".bin")) {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + out + " for writing");
    rmf::write_set_binary(sets.s, file);
    if (!file) throw std::runtime_error("write to " + out + " failed");
    std::cerr << "wrote " << out << '\n';
    Json doc{{"schema", 1},
             {"command", "set"},
             {"config", rmf::config_json(r)},
             {"sets", rmf::set_summary(sets)}};
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  Json doc{{"schema", 1},
           {"command", "set"},
           {"config", rmf::config_json(r)},
           {"sets", rmf::set_summary(sets)},
           {"set", rmf::to_json(sets.s)}};
  emit(doc, out);
  return 0;
}

int cmd_energy(const FlagSet& f, const std::string& out) {
  const auto r = rmf::resolve(rmf::parse_config(f.merged()), false);
  const auto table = rmf::obtain_sieve(r);
  const auto sets = rmf::construct_sets(r, table);
  print_sets(sets);
  rmf::EnergyRequest request;
  request.product_ks = r.config.product_ks;
  request.offdiagonal_cap = r.config.offdiagonal_cap;
  rmf::EnergyOptions options;
  options.threads = r.config.threads;
  const auto report = rmf::energy_report(table, sets.s, request, options);
  std::cerr << "|S| = " << report.set_size << "  E_x = " << report.e_times
            << "  off-diagonal = " << report.offdiagonal << '\n';
  if (report.e_square) std::cerr << "E_sq = " << *report.e_square << '\n';
  if (report.histogram) {
    std::cerr << "max_p #{s : P(s) = p} = " << report.histogram->max_count
              << " (p = " << report.histogram->argmax << ")\n";
  }
  Json doc{{"schema", 1},
           {"command", "energy"},
           {"config", rmf::config_json(r)},
           {"sets", rmf::set_summary(sets)},
           {"energy", rmf::to_json(report)}};
  emit(doc, out);
  return 0;
}

int cmd_simulate(const FlagSet& f, const std::string& out) {
  const auto r = rmf::resolve(rmf::parse_config(f.merged()), true);
  const auto& c = r.config;
  const auto table = rmf::obtain_sieve(r);
  const auto sets = rmf::construct_sets(r, table);
  print_sets(sets);
  const auto batch =
      rmf::sample_batch(c.model, sets.s, table, c.samples, *c.seed, c.threads);
  std::cerr << "sampled " << batch.size() << " values of Z ("
            << rmf::model_name(c.model) << ", kernels "
            << rmf::simd::isa_name(rmf::simd::active_isa()) << ")\n";
  if (!c.csv.empty()) {
    std::ofstream file(c.csv);
    rmf::write_batch_csv(batch, file);
    if (!file) throw std::runtime_error("write to " + c.csv + " failed");
  }
  if (!out.empty() && ends_with(out, ".csv")) {
    std::ofstream file(out);
    rmf::write_batch_csv(batch, file);
    if (!file) throw std::runtime_error("write to " + out + " failed");
    std::cerr << "wrote " << out << '\n';
    return 0;
  }
  Json doc{{"schema", 1},
           {"command", "simulate"},
           {"config", rmf::config_json(r)},
           {"batch", rmf::to_json(batch)}};
  emit(doc, out);
  return 0;
}

int cmd_verify(const FlagSet& f, const std::string& out,
               std::optional<double> martingale_t) {
  const auto r = rmf::resolve(rmf::parse_config(f.merged()), true);
  const auto& c = r.config;
  const auto table = rmf::obtain_sieve(r);
  const auto sets = rmf::construct_sets(r, table);
  print_sets(sets);

  Json doc{{"schema", 1},
           {"command", "verify"},
           {"config", rmf::config_json(r)},
           {"sets", rmf::set_summary(sets)}};
  if (sets.s.min_element() >= 2) {
    const auto cert = rmf::epsilon_certificate(sets.a, sets.s, table);
    std::fprintf(stderr, "eps1 = %.6g  eps2 = %.6g  eps3 = %.6g  eps = %.6g\n",
                 cert.eps1, cert.eps2, cert.eps3, cert.eps);
    doc["certificate"] = rmf::to_json(cert);
  } else {
    doc["certificate"] = nullptr;
  }

  const auto batch =
      rmf::sample_batch(c.model, sets.a, table, c.samples, *c.seed, c.threads);
  const auto exact = rmf::exact_fourth_moment(c.model, sets.a, table, nullptr);
  rmf::CharFnReport cf;
  Json stats = rmf::batch_statistics(r, batch, exact, &cf);
  print_stats(stats);
  for (auto& [key, value] : stats.items()) doc[key] = std::move(value);

  if (martingale_t) {
    if (sets.a.min_element() < 2) {
      throw rmf::PreconditionError("martingale check needs elements >= 2");
    }
    // Differences ordered by the largest prime factor of each element.
    const rmf::PreparedSet prepared(table, sets.a);
    std::vector<std::size_t> slot(prepared.primes().size(), 0);
    std::vector<bool> used(prepared.primes().size(), false);
    for (std::size_t i = 0; i < sets.a.size(); ++i) {
      used[prepared.largest_prime_index(i)] = true;
    }
    std::size_t length = 0;
    for (std::size_t j = 0; j < used.size(); ++j) {
      if (used[j]) slot[j] = length++;
    }
    const double scale = 1.0 / std::sqrt(sets.a.variance());
    std::vector<double> re, im;
    std::vector<std::complex<double>> comps(length);
    std::optional<rmf::MartingaleAccumulator> acc;
    for (std::uint64_t k = 0; k < c.samples; ++k) {
      prepared.evaluate({c.model, *c.seed, k}, re, im);
      std::fill(comps.begin(), comps.end(), std::complex<double>());
      for (std::size_t i = 0; i < sets.a.size(); ++i) {
        comps[slot[prepared.largest_prime_index(i)]] +=
            sets.a.weight(i) * std::complex<double>(re[i], im[i]) * scale;
      }
      auto [x, t] = rmf::project_components(comps, *martingale_t, 0.0);
      if (!acc) acc.emplace(length, t);
      acc->add(x);
    }
    const auto mr = acc->finish();
    std::fprintf(stderr,
                 "martingale t = %.3g: |phi_hat - target| = %.4f, bound terms "
                 "%.4f + %.4f\n",
                 mr.t, mr.deviation, mr.fourth_term, mr.variance_term);
    doc["martingale"] = rmf::to_json(mr);
  }

  if (!c.csv.empty()) {
    std::ofstream file(c.csv);
    rmf::write_batch_csv(batch, file);
  }
  if (!c.columns.empty()) {
    std::ofstream file(c.columns);
    rmf::write_char_fn_columns(cf, file);
  }
  emit(doc, out);
  return 0;
}

struct DioFlags {
  std::string theta;
  std::optional<std::uint64_t> x, ell_max, v_max, dirichlet_q;
  std::optional<double> delta;
  std::size_t depth = 20;
  double growth_c = 0.2;
  double growth_exponent = 1.0 / 50.0;
  std::uint64_t q_max = 10'000;
};

int cmd_dio(const DioFlags& d, const std::string& out) {
  if (d.theta.empty()) throw rmf::PreconditionError("--theta is required");
  const rmf::Theta theta = rmf::Theta::parse(d.theta);

  // Defaults intended for large x: |l| <= sqrt x, v <= (log x)^5,
  // ||v l theta|| <= x^(-1/3).
  std::optional<std::uint64_t> ell_max = d.ell_max, v_max = d.v_max;
  std::optional<double> delta = d.delta;
  Json sources = Json::object();
  if (d.x) {
    const double x = static_cast<double>(*d.x);
    if (!ell_max) {
      ell_max = static_cast<std::uint64_t>(std::floor(std::sqrt(x)));
      sources["ell_max"] = "sqrt(x)";
    }
    if (!v_max) {
      v_max = static_cast<std::uint64_t>(
          std::max(1.0, std::floor(std::pow(std::log(x), 5.0))));
      sources["v_max"] = "(log x)^5";
    }
    if (!delta) {
      delta = std::pow(x, -1.0 / 3.0);
      sources["delta"] = "x^(-1/3)";
    }
  }

  Json doc{{"schema", 1}, {"command", "dio"}};
  doc["theta"] = theta.spec();
  doc["theta_value"] = theta.to_double();
  const auto cf = rmf::expand(theta, d.depth);
  doc["continued_fraction"] = rmf::to_json(cf);

  const auto growth =
      rmf::check_growth_condition(theta, d.growth_c, d.growth_exponent, d.q_max);
  doc["growth"] = rmf::to_json(growth);
  doc["growth"]["c"] = d.growth_c;
  doc["growth"]["exponent"] = d.growth_exponent;
  doc["growth"]["q_max"] = d.q_max;
  std::fprintf(stderr, "growth condition up to q = %llu: %s (worst q = %llu, "
               "||q theta|| = %.6g)\n",
               static_cast<unsigned long long>(d.q_max),
               growth.passed ? "pass" : "FAIL",
               static_cast<unsigned long long>(growth.worst_q),
               growth.worst_distance);

  const std::uint64_t dq = d.dirichlet_q.value_or(v_max.value_or(d.q_max));
  const auto approx = rmf::dirichlet_approx(theta, dq);
  doc["dirichlet"] = {{"Q", dq},
                      {"u", rmf::big_json(approx.u)},
                      {"v", approx.v},
                      {"certified", approx.certified}};

  if (ell_max && v_max && delta) {
    const auto bad = rmf::bad_set(theta, *ell_max, *v_max, *delta);
    const auto gap = rmf::min_gap(bad);
    doc["bad_set"] = {{"ell_max", *ell_max},
                      {"v_max", *v_max},
                      {"delta", *delta},
                      {"sources", sources},
                      {"size", bad.size()},
                      {"elements", bad},
                      {"min_gap", gap ? Json(*gap) : Json(nullptr)}};
    std::cerr << "bad set: " << bad.size() << " elements";
    if (gap) std::cerr << ", min gap " << *gap;
    std::cerr << '\n';
  } else {
    doc["bad_set"] = nullptr;
    std::cerr << "bad set skipped: give --x or all of --ell-max, --v-max, "
                 "--delta\n";
  }
  emit(doc, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random multiplicative functions: sets, energies, sampling, "
               "Gaussianity diagnostics and Diophantine checks.\n" +
               std::string(kSieveMemoryNote)};
  app.require_subcommand(1);

  std::string out;
  FlagSet sieve_flags, set_flags, energy_flags, sim_flags, verify_flags,
      exp_flags;

  auto* sieve = app.add_subcommand("sieve", std::string("Build or verify a binary sieve cache. ") +
                                                kSieveMemoryNote);
  sieve_flags.add(sieve, "sieve-limit", "Largest integer covered");
  sieve->add_option("--config", sieve_flags.config_file, "key = value file");
  sieve->add_option("--out", out, "Cache path; omit to sieve in memory only");

  auto* set = app.add_subcommand("set", "Construct a set and print it");
  add_set_flags(set, set_flags);
  set->add_option("--out", out, "Write JSON, or the binary form for *.bin");

  auto* energy = app.add_subcommand("energy", "Energies and condition sums of a set");
  add_set_flags(energy, energy_flags);
  energy_flags.add(energy, "product-ks", "Comma-separated k in {1,2,3} for |S^k|");
  energy_flags.add(energy, "offdiagonal-cap", "List at most this many quadruples");
  energy->add_option("--out", out, "JSON output path");

  auto* simulate = app.add_subcommand("simulate", "Sample Z over the final set");
  add_set_flags(simulate, sim_flags);
  add_sampling_flags(simulate, sim_flags);
  simulate->add_option("--out", out, "JSON output path, or CSV for *.csv");

  std::optional<double> martingale_t;
  auto* verify = app.add_subcommand(
      "verify", "Certificate for (A, S) and Gaussianity diagnostics over A");
  add_set_flags(verify, verify_flags);
  add_sampling_flags(verify, verify_flags);
  verify->add_option("--martingale-t", martingale_t,
                     "Also run the martingale bound check at t");
  verify->add_option("--out", out, "JSON output path");

  DioFlags dio_flags;
  auto* dio = app.add_subcommand("dio", "Continued fractions, growth condition, bad set");
  dio->add_option("--theta", dio_flags.theta,
                  "rational:p/q, quadratic:a,b,c,d or decimal:<digits>@<bits>")
      ->required();
  dio->add_option("--x", dio_flags.x,
                  "Scale for the defaults ell_max = sqrt x, v_max = (log x)^5, "
                  "delta = x^(-1/3)");
  dio->add_option("--ell-max", dio_flags.ell_max, "Bad set |l| bound");
  dio->add_option("--v-max", dio_flags.v_max, "Bad set v bound");
  dio->add_option("--delta", dio_flags.delta, "Bad set threshold in (0, 1/2)");
  dio->add_option("--depth", dio_flags.depth, "Continued fraction depth")
      ->capture_default_str();
  dio->add_option("--growth-c", dio_flags.growth_c, "Growth constant C")
      ->capture_default_str();
  dio->add_option("--growth-exponent", dio_flags.growth_exponent,
                  "Growth exponent")
      ->capture_default_str();
  dio->add_option("--q-max", dio_flags.q_max, "Growth scan bound Q")
      ->capture_default_str();
  dio->add_option("--dirichlet-q", dio_flags.dirichlet_q,
                  "Dirichlet bound (default v_max, else Q)");
  dio->add_option("--out", out, "JSON output path");

  auto* experiment = app.add_subcommand(
      "experiment", "Full pipeline: sets, energies, certificate, sampling, "
                    "Gaussianity report");
  add_set_flags(experiment, exp_flags);
  add_sampling_flags(experiment, exp_flags);
  exp_flags.add(experiment, "product-ks", "Comma-separated k in {1,2,3}");
  exp_flags.add(experiment, "offdiagonal-cap", "List at most this many quadruples");
  experiment->add_option("--out", out, "JSON output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sieve) return cmd_sieve(sieve_flags, out);
    if (*set) return cmd_set(set_flags, out);
    if (*energy) return cmd_energy(energy_flags, out);
    if (*simulate) return cmd_simulate(sim_flags, out);
    if (*verify) return cmd_verify(verify_flags, out, martingale_t);
    if (*dio) return cmd_dio(dio_flags, out);
    if (*experiment) {
      auto values = exp_flags.merged();
      if (!out.empty()) values["out"] = out;
      const auto config = rmf::parse_config(values);
      const Json report = rmf::run_experiment(config);
      const auto& sets = report["sets"];
      std::cerr << "A: " << sets["A"]["label"].get<std::string>() << " ("
                << sets["A"]["size"].get<std::uint64_t>() << ")\nS: "
                << sets["S"]["label"].get<std::string>() << " ("
                << sets["S"]["size"].get<std::uint64_t>() << ")\n";
      std::cerr << "E_x(A) = " << report["energy"]["e_times"].get<std::uint64_t>()
                << '\n';
      if (!report["certificate"].is_null()) {
        std::fprintf(stderr, "eps = %.6g\n",
                     report["certificate"]["eps"].get<double>());
      }
      print_stats(report);
      emit(report, config.out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
