// JSON and CSV encodings for specs, plans, datasets and run manifests.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rusamp/distortion.hpp"
#include "rusamp/oaa.hpp"
#include "rusamp/rus.hpp"
#include "rusamp/tcost.hpp"

namespace rusamp {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

/// %.17g: shortest form that round-trips every double.
std::string format_real(double x);

// ---- matrices and specs ------------------------------------------------------------------

/// Row-major list of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
/// Throws std::invalid_argument on malformed input or non-square length.
Matrix matrix_from_json(const Json& j);

Json to_json(const RusSpec& spec);
/// Parses and validates. Throws std::invalid_argument.
RusSpec rus_spec_from_json(const Json& j);

Json to_json(const StandardPlan& p);
Json to_json(const DeterministicPlan& p);
Json to_json(const Pi3Plan& p);
Json to_json(const FixedPointPlan& p);
StandardPlan standard_plan_from_json(const Json& j);
DeterministicPlan deterministic_plan_from_json(const Json& j);
Pi3Plan pi3_plan_from_json(const Json& j);
FixedPointPlan fp_plan_from_json(const Json& j);

Json to_json(const CostResult& r);

// ---- CSV ----------------------------------------------------------------------------------

/// Header: x,curve_id,mean,std,n_samples,seed
void write_figure_csv(std::ostream& os, const std::vector<FigureRow>& rows);
/// Header: lambda0,strategy,total_t,j,k,L,n_S,epsilon_reflection (empty when not applicable)
void write_cost_csv(std::ostream& os, const std::vector<CostRow>& rows);

// ---- manifests ----------------------------------------------------------------------------

struct RunManifest {
    std::string command;
    Json config;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::string timestamp;

    Json to_json() const;
};

/// 16 hex digits of FNV-1a over the compact dump of config (keys sorted).
std::string config_hash(const Json& config);

/// UTC ISO-8601 time; SOURCE_DATE_EPOCH overrides the clock when set.
std::string current_timestamp();

RunManifest make_manifest(std::string command, Json config, std::uint64_t seed);

}  // namespace rusamp
