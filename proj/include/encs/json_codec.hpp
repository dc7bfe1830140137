#pragma once

#include <string>

#include "json.hpp"

#include "encs/annotation_stats.hpp"
#include "encs/breakeven.hpp"
#include "encs/core_cost.hpp"
#include "encs/inference_cost.hpp"
#include "encs/scenario.hpp"
#include "encs/usability_fit.hpp"
#include "encs/usability_model.hpp"

// JSON encoding of the domain types. Decoders are strict: unknown keys,
// missing required keys and wrong types raise InvalidInput carrying the
// offending field path.

namespace encs::json {

using Json = nlohmann::ordered_json;

Json encode(const AgentEconomics& v);
Json encode(const ActionTimings& v);
Json encode(const ActionSavings& v);
Json encode(const UsageDistribution& v);
Json encode(const SimplexPolicy& v);
Json encode(const EncsResult& v);
Json encode(const SimulationResult& v);
Json encode(const GpuPricing& v);
Json encode(const ServingProfile& v);
Json encode(const ApiPricing& v);
Json encode(const MessageShape& v);
Json encode(const LinearModel& v);
Json encode(const RuCoefficients& v);
Json encode(const RuPrediction& v);
Json encode(const RndCost& v);
Json encode(const BreakEvenResult& v);
Json encode(const LaborComparison& v);
Json encode(const Scenario& v);
Json encode(const Report& v);
Json encode(const FitObservation& v);
Json encode(const FitResult& v);
Json encode(const BreakEvenCurve& v);

AgentEconomics decode_economics(const Json& j, const std::string& path);
ActionTimings decode_timings(const Json& j, const std::string& path);
UsageDistribution decode_usage(const Json& j, const std::string& path);
SimplexPolicy decode_simplex(const Json& j, const std::string& path);
GpuPricing decode_gpu(const Json& j, const std::string& path);
ApiPricing decode_api_pricing(const Json& j, const std::string& path);
MessageShape decode_shape(const Json& j, const std::string& path);
LinearModel decode_linear_model(const Json& j, const std::string& path);
RuCoefficients decode_coefficients(const Json& j, const std::string& path);
RndCost decode_rnd(const Json& j, const std::string& path);
Scenario decode_scenario(const Json& j);
FitObservation decode_observation(const Json& j, const std::string& path);
// quantile: type7|type6; outliers: pooled|per-model|none.
FitOptions decode_fit_options(const Json& j, const std::string& path);

// Parses text, mapping syntax errors to ErrorCode::kInvalidJson.
Json parse(std::string_view text);

}  // namespace encs::json
