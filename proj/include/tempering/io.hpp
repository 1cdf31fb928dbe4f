#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tempering/hardness.hpp"
#include "tempering/lower_bound.hpp"
#include "tempering/measure.hpp"
#include "tempering/paths.hpp"
#include "tempering/sampler.hpp"
#include "tempering/spectral.hpp"
#include "tempering/stochastic_matrix.hpp"

namespace tempering {

using json = nlohmann::json;

// Natural log of a positive decimal such as "2.5e-4000". The mantissa and
// the decimal exponent are handled separately, so magnitudes far outside
// double range are kept.
double parse_log_decimal(const std::string& text);

// {"atoms": [{"weight": "1.5" | 1.5, "mode": k}, ...], "betas": [...]}.
// "log_weight" may replace "weight". Modes are 0-based. Throws ArgumentError.
TemperedFamily parse_family(const json& doc);
TemperedFamily load_family(const std::string& path);
json family_to_json(const TemperedFamily& family);

// {"matrix": [[...], ...], "stationary": [...]}. Without "stationary" the
// left Perron vector of the matrix is used.
StochasticMatrix parse_kernel(const json& doc);

json read_json_file(const std::string& path);

json codec_to_json(const StateCodec& codec);
// Header for the triplet export: size, codec, stationary law.
json kernel_header(const StochasticMatrix& kernel);
// "row,col,value" lines, values with 17 significant digits.
void write_kernel_csv(std::ostream& out, const StochasticMatrix& kernel);

json rational_to_json(const Rational& q);

void to_json(json& j, const SpectrumReport& report);
void to_json(json& j, const CongestionReport& report);
void to_json(json& j, const MultiplicityReport& report);
void to_json(json& j, const MassRatioReport& report);
void to_json(json& j, const ModeMassReport& report);
void to_json(json& j, const BottleneckReport& report);
void to_json(json& j, const CertificateReport& report);
void to_json(json& j, const FOracleResult& result);
void to_json(json& j, const Move& move);
void to_json(json& j, const InequalityCheck& check);
void to_json(json& j, const LowerBoundReport& report);

json instance_to_json(const HardInstance& inst);

// "iteration,level,atom" rows; with all_levels false only level L is written.
void write_trace_csv(std::ostream& out, const PTTrace& trace, bool all_levels = false);
json trace_summary(const PTTrace& trace, const TemperedFamily& family);

}  // namespace tempering
