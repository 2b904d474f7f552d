#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>

#include "rmf/diophantine.hpp"
#include "rmf/energy.hpp"
#include "rmf/gaussianity.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sets.hpp"

namespace rmf {

using Json = nlohmann::ordered_json;

Json complex_json(std::complex<double> z);
// Integers beyond 64 bits are written as decimal strings.
Json big_json(const BigInt& v);

// {label, n: [...], re_weights: [...], im_weights: [...]}; indicator sets
// omit the weight arrays.
Json to_json(const WeightedSet& set);
// Throws CorruptDataError on malformed documents.
WeightedSet set_from_json(const Json& doc);

// u64 count, u64 elements, then (re, im) f64 pairs unless indicator. All
// little-endian. The label is not stored.
void write_set_binary(const WeightedSet& set, std::ostream& out);
WeightedSet read_set_binary(std::istream& in, std::string label);

Json to_json(const EnergyReport& report);
Json to_json(const ConditionSums& sums);
Json to_json(const EpsilonCertificate& cert);
Json to_json(const CharFnReport& report);
Json to_json(const MomentReport& report);
Json to_json(const MartingaleReport& report);
Json to_json(const ContinuedFraction& cf);
Json to_json(const GrowthCheck& check);

// Batch metadata plus values as [[re, im], ...].
Json to_json(const SampleBatch& batch);
// "index,re,im" rows with a header line; values at round-trip precision.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);

// Whitespace-separated columns "t1 t2 re im target deviation std_error"
// for plotting tools.
void write_char_fn_columns(const CharFnReport& report, std::ostream& out);

}  // namespace rmf
