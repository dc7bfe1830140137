#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "encs/breakeven.hpp"
#include "encs/core_cost.hpp"
#include "encs/inference_cost.hpp"
#include "encs/usability_model.hpp"

// What-if scenarios: every model resolves to one usage source and one cost
// source. Preset references are kept by name and resolved at evaluation time,
// so a loaded scenario re-emits exactly as written.

namespace encs {

class PresetStore;

inline constexpr int kScenarioSchemaVersion = 1;

struct NamedRef {
  std::string name;
  bool operator==(const NamedRef&) const = default;
};

// Usage sources.
struct UsageFromDistribution {
  UsageDistribution distribution;
  bool operator==(const UsageFromDistribution&) const = default;
};
struct UsageFromPreset {
  std::string name;
  bool operator==(const UsageFromPreset&) const = default;
};
struct UsageFromPerplexity {
  double ppl = 0.0;
  std::variant<NamedRef, RuCoefficients> coefficients;
  bool operator==(const UsageFromPerplexity&) const = default;
};
using UsageSource = std::variant<UsageFromDistribution, UsageFromPreset, UsageFromPerplexity>;

// Cost sources.
struct CostExplicit {
  double usd_per_message = 0.0;
  bool operator==(const CostExplicit&) const = default;
};
struct CostFromPreset {
  std::string name;
  bool operator==(const CostFromPreset&) const = default;
};
struct CostSelfHosted {
  std::variant<NamedRef, ServingProfile> profile;
  bool operator==(const CostSelfHosted&) const = default;
};
struct CostApi {
  std::variant<NamedRef, ApiPricing> pricing;
  MessageShape shape;
  bool operator==(const CostApi&) const = default;
};
// Monthly token usage plus optional R&D overhead, spread over monthly messages.
struct CostMonthly {
  std::variant<NamedRef, ApiPricing> pricing;
  std::optional<double> monthly_tokens;
  std::optional<MessageShape> shape;  // per unit, with units_per_month
  double units_per_month = 0.0;
  double extra_monthly_overhead = 0.0;
  bool include_rnd_overhead = false;
  bool operator==(const CostMonthly&) const = default;
};
using CostSource = std::variant<CostExplicit, CostFromPreset, CostSelfHosted, CostApi, CostMonthly>;

struct ModelSpec {
  std::string model_id;
  UsageSource usage;
  CostSource cost;
  bool operator==(const ModelSpec&) const = default;
};

struct Volumes {
  double messages_per_month = 0.0;
  double annual_messages = 0.0;
  bool operator==(const Volumes&) const = default;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  AgentEconomics economics;
  ActionTimings timings;
  SimplexPolicy simplex;
  Volumes volumes;
  std::optional<RndCost> rnd;
  std::vector<ModelSpec> models;
  bool operator==(const Scenario&) const = default;
};

enum class BreakEvenStatus { kNotApplicable, kBreaksEven, kNever };

struct ReportRow {
  std::string model_id;
  std::optional<double> ppl;
  bool extrapolated = false;
  UsageDistribution usage;
  double cost_per_message = 0.0;
  double gross_savings = 0.0;
  double encs_per_message = 0.0;
  double encs_per_year = 0.0;
  BreakEvenStatus break_even_status = BreakEvenStatus::kNotApplicable;
  double per_message_maintenance = 0.0;
  std::optional<BreakEvenResult> break_even;
};

struct Report {
  std::string scenario_name;
  std::string preset_version;
  Scenario scenario;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
};

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_report_format(std::string_view name);

// Throws InvalidInput, SimplexViolation or UnknownPreset; never-breaks-even is
// recorded per row instead.
void validate(const Scenario& scenario, const PresetStore& presets);

Report evaluate_scenario(const Scenario& scenario, const PresetStore& presets);

// Canonical JSON encoding, two-space indent, keys in schema order.
std::string emit_scenario(const Scenario& scenario);
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);

std::string emit_report(const Report& report, ReportFormat format);

// Columns: messages,spend,spend_no_maintenance,labor_offset.
std::string emit_curve_csv(const BreakEvenCurve& curve);

// Resolved building blocks, shared by the CLI and the service.
UsageDistribution resolve_usage(const UsageSource& source, const PresetStore& presets,
                                std::optional<double>* ppl_out = nullptr);
double resolve_cost(const CostSource& source, const Scenario& scenario,
                    const PresetStore& presets);

// Conversation filter applied before annotation.
struct ConversationMeta {
  std::string conversation_id;
  int agent_turns = 0;
  int human_agent_messages = 0;
  int bot_messages = 0;
  double quality_score = 0.0;
};

enum class FilterReason { kMinAgentTurns, kHumanBotRatio, kQualityScore };

std::string_view to_string(FilterReason reason);

struct FilterConfig {
  int min_agent_turns = 2;
  double quality_threshold = 0.0;
  bool strict_quality = true;  // score > threshold; false means score >= threshold
};

struct FilterOutcome {
  std::vector<ConversationMeta> kept;
  std::vector<std::pair<ConversationMeta, FilterReason>> rejected;
};

FilterOutcome dataset_filter(const std::vector<ConversationMeta>& metas,
                             const FilterConfig& config = {});

}  // namespace encs
