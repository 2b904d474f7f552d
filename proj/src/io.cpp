#include "rmf/io.hpp"

#include <bit>
#include <charconv>
#include <istream>
#include <ostream>

#include "rmf/errors.hpp"

namespace rmf {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw CorruptDataError("truncated binary set");
  return v;
}

Json quadruple_json(const Quadruple& q) {
  return Json::array({q.m1, q.m2, q.n1, q.n2});
}

}  // namespace

static_assert(std::endian::native == std::endian::little,
              "binary set I/O assumes a little-endian host");

Json big_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() &&
      v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

Json complex_json(std::complex<double> z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

Json to_json(const WeightedSet& set) {
  Json doc;
  doc["label"] = set.label();
  doc["n"] = std::vector<std::uint64_t>(set.support().begin(),
                                        set.support().end());
  if (!set.is_indicator()) {
    Json re = Json::array(), im = Json::array();
    for (const auto& w : set.weights()) {
      re.push_back(w.real());
      im.push_back(w.imag());
    }
    doc["re_weights"] = std::move(re);
    doc["im_weights"] = std::move(im);
  }
  return doc;
}

WeightedSet set_from_json(const Json& doc) {
  try {
    auto support = doc.at("n").get<std::vector<std::uint64_t>>();
    std::string label = doc.value("label", std::string());
    const bool has_re = doc.contains("re_weights");
    const bool has_im = doc.contains("im_weights");
    if (has_re != has_im) {
      throw CorruptDataError("set JSON needs both re_weights and im_weights");
    }
    if (!has_re) return WeightedSet::indicator(std::move(support), std::move(label));
    const auto re = doc.at("re_weights").get<std::vector<double>>();
    const auto im = doc.at("im_weights").get<std::vector<double>>();
    if (re.size() != support.size() || im.size() != support.size()) {
      throw CorruptDataError("set JSON weight arrays have the wrong length");
    }
    std::vector<std::complex<double>> w(re.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = {re[i], im[i]};
    return WeightedSet::weighted(std::move(support), std::move(w),
                                 std::move(label));
  } catch (const Json::exception& e) {
    throw CorruptDataError(std::string("malformed set JSON: ") + e.what());
  } catch (const PreconditionError& e) {
    throw CorruptDataError(std::string("invalid set JSON: ") + e.what());
  }
}

void write_set_binary(const WeightedSet& set, std::ostream& out) {
  put<std::uint64_t>(out, set.size());
  for (const std::uint64_t n : set.support()) put<std::uint64_t>(out, n);
  for (const auto& w : set.weights()) {
    put<double>(out, w.real());
    put<double>(out, w.imag());
  }
}

WeightedSet read_set_binary(std::istream& in, std::string label) {
  const auto count = get<std::uint64_t>(in);
  if (count > (std::uint64_t{1} << 40)) {
    throw CorruptDataError("binary set count is implausible");
  }
  std::vector<std::uint64_t> support;
  support.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    support.push_back(get<std::uint64_t>(in));
  }
  // Indicator sets end here; weighted sets carry exactly one pair per element.
  if (in.peek() == std::char_traits<char>::eof()) {
    try {
      return WeightedSet::indicator(std::move(support), std::move(label));
    } catch (const PreconditionError& e) {
      throw CorruptDataError(e.what());
    }
  }
  std::vector<std::complex<double>> w(count);
  for (auto& z : w) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CorruptDataError("trailing bytes after binary set");
  }
  try {
    return WeightedSet::weighted(std::move(support), std::move(w),
                                 std::move(label));
  } catch (const PreconditionError& e) {
    throw CorruptDataError(e.what());
  }
}

Json to_json(const ConditionSums& sums) {
  Json doc;
  doc["cond2"] = complex_json(sums.cond2);
  doc["cond3"] = complex_json(sums.cond3);
  if (sums.cond2_count) doc["cond2_exact"] = *sums.cond2_count;
  if (sums.cond3_count) doc["cond3_exact"] = *sums.cond3_count;
  return doc;
}

Json to_json(const EnergyReport& r) {
  Json doc;
  doc["set_size"] = r.set_size;
  doc["e_times"] = r.e_times;
  doc["offdiagonal"] = r.offdiagonal;
  doc["e_square"] = r.e_square ? Json(*r.e_square) : Json(nullptr);
  if (r.conditions) {
    doc["conditions"] = to_json(*r.conditions);
  }
  if (r.histogram) {
    doc["per_prime_max"] = r.histogram->max_count;
    doc["per_prime_argmax"] = r.histogram->argmax;
    doc["distinct_largest_primes"] = r.histogram->counts.size();
  }
  Json sizes = Json::object();
  for (const auto& [k, v] : r.product_set_sizes) sizes[std::to_string(k)] = v;
  doc["product_set_sizes"] = std::move(sizes);
  if (!r.sample_offdiagonal.empty() || r.sample_truncated) {
    Json list = Json::array();
    for (const auto& q : r.sample_offdiagonal) list.push_back(quadruple_json(q));
    doc["offdiagonal_sample"] = std::move(list);
    doc["offdiagonal_sample_truncated"] = r.sample_truncated;
  }
  return doc;
}

Json to_json(const EpsilonCertificate& c) {
  Json doc;
  doc["eps1"] = c.eps1;
  doc["eps2"] = c.eps2;
  doc["eps3"] = c.eps3;
  doc["eps"] = c.eps;
  doc["V"] = c.variance;
  doc["outside_mass"] = c.outside_mass;
  doc["cond2"] = complex_json(c.cond2);
  doc["cond3"] = complex_json(c.cond3);
  if (c.cond2_count) doc["cond2_exact"] = *c.cond2_count;
  if (c.cond3_count) doc["cond3_exact"] = *c.cond3_count;
  return doc;
}

Json to_json(const CharFnReport& r) {
  Json doc;
  doc["target"] = r.real_target ? "real_normal" : "complex_normal";
  doc["max_deviation"] = r.max_deviation;
  Json pts = Json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"t1", p.t1},
                   {"t2", p.t2},
                   {"empirical", complex_json(p.empirical)},
                   {"target", p.target},
                   {"deviation", p.deviation},
                   {"std_error", p.std_error}});
  }
  doc["points"] = std::move(pts);
  return doc;
}

Json to_json(const MomentReport& r) {
  Json doc;
  doc["samples"] = r.samples;
  doc["mean_abs2"] = r.mean_abs2;
  doc["se_abs2"] = r.se_abs2;
  doc["mean_abs4"] = r.mean_abs4;
  doc["se_abs4"] = r.se_abs4;
  doc["mean_sq"] = complex_json(r.mean_sq);
  doc["reference"] = {{"abs2", r.reference_abs2},
                      {"abs4", r.reference_abs4},
                      {"sq", r.reference_sq}};
  if (r.exact_abs4) {
    doc["exact_abs4"] = *r.exact_abs4;
    doc["ratio"] = *r.ratio;
    doc["ratio_se"] = *r.ratio_se;
  }
  return doc;
}

Json to_json(const MartingaleReport& r) {
  return Json{{"sequences", r.sequences},
              {"length", r.length},
              {"t", r.t},
              {"sum_fourth", r.sum_fourth},
              {"variance_concentration", r.variance_concentration},
              {"phi_hat", complex_json(r.phi_hat)},
              {"target", r.target},
              {"deviation", r.deviation},
              {"fourth_term", r.fourth_term},
              {"variance_term", r.variance_term},
              {"deviation_over_bound", r.ratio}};
}

Json to_json(const ContinuedFraction& cf) {
  Json q = Json::array(), conv = Json::array();
  for (const auto& a : cf.quotients) q.push_back(big_json(a));
  for (const auto& c : cf.convergents) {
    conv.push_back(Json::array({big_json(c.p), big_json(c.q)}));
  }
  return Json{{"quotients", std::move(q)},
              {"convergents", std::move(conv)},
              {"terminated", cf.terminated},
              {"precision_exhausted", cf.precision_exhausted}};
}

Json to_json(const GrowthCheck& g) {
  Json doc{{"passed", g.passed},
           {"worst_q", g.worst_q},
           {"worst_distance", g.worst_distance},
           {"worst_scaled", g.worst_scaled}};
  doc["first_failure"] = g.first_failure ? Json(*g.first_failure) : Json(nullptr);
  return doc;
}

Json to_json(const SampleBatch& batch) {
  Json values = Json::array();
  for (const auto& z : batch.values) {
    values.push_back(Json::array({z.real(), z.imag()}));
  }
  return Json{{"model", std::string(model_name(batch.model))},
              {"seed", batch.seed},
              {"set_label", batch.set_label},
              {"M", batch.size()},
              {"V", batch.variance},
              {"values", std::move(values)}};
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  out << "index,re,im\n";
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out << i << ',' << shortest(batch.values[i].real()) << ','
        << shortest(batch.values[i].imag()) << '\n';
  }
}

void write_char_fn_columns(const CharFnReport& report, std::ostream& out) {
  out << "# t1 t2 re im target deviation std_error\n";
  for (const auto& p : report.points) {
    out << shortest(p.t1) << ' ' << shortest(p.t2) << ' '
        << shortest(p.empirical.real()) << ' ' << shortest(p.empirical.imag())
        << ' ' << shortest(p.target) << ' ' << shortest(p.deviation) << ' '
        << shortest(p.std_error) << '\n';
  }
}

}  // namespace rmf
