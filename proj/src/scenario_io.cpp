#include "encs/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "encs/error.hpp"
#include "encs/json_codec.hpp"
#include "encs/presets.hpp"

namespace encs {

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // "-0.00" and friends render as unsigned zero.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const RuCoefficients& coefficients_of(const UsageFromPerplexity& source,
                                      const PresetStore& presets) {
  if (const auto* ref = std::get_if<NamedRef>(&source.coefficients)) {
    return presets.coefficients(ref->name);
  }
  return std::get<RuCoefficients>(source.coefficients);
}

ServingProfile profile_of(const CostSelfHosted& source, const PresetStore& presets) {
  if (const auto* ref = std::get_if<NamedRef>(&source.profile)) {
    return presets.serving_profile(ref->name);
  }
  return std::get<ServingProfile>(source.profile);
}

const ApiPricing& pricing_of(const std::variant<NamedRef, ApiPricing>& pricing,
                             const PresetStore& presets) {
  if (const auto* ref = std::get_if<NamedRef>(&pricing)) return presets.api_pricing(ref->name);
  return std::get<ApiPricing>(pricing);
}

std::string describe_usage(const UsageSource& source) {
  if (const auto* p = std::get_if<UsageFromPerplexity>(&source)) {
    std::string coeff = "inline coefficients";
    if (const auto* ref = std::get_if<NamedRef>(&p->coefficients)) {
      coeff = "coefficient set " + ref->name;
    }
    return "usage extrapolated from perplexity " + fixed(p->ppl, 2) + " via " + coeff;
  }
  if (const auto* p = std::get_if<UsageFromPreset>(&source)) return "usage preset " + p->name;
  return "usage given directly";
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw Error(ErrorCode::kUnknownFormat, "unknown report format: " + std::string(name),
              "format");
}

UsageDistribution resolve_usage(const UsageSource& source, const PresetStore& presets,
                                std::optional<double>* ppl_out) {
  if (ppl_out) ppl_out->reset();
  if (const auto* d = std::get_if<UsageFromDistribution>(&source)) return d->distribution;
  if (const auto* p = std::get_if<UsageFromPreset>(&source)) return presets.usage(p->name);
  const auto& p = std::get<UsageFromPerplexity>(source);
  const RuPrediction prediction = predict_ru(p.ppl, coefficients_of(p, presets));
  if (ppl_out) *ppl_out = p.ppl;
  return {prediction.p_use, prediction.p_edit, prediction.p_ignore};
}

double resolve_cost(const CostSource& source, const Scenario& scenario,
                    const PresetStore& presets) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CostExplicit>) {
          if (!std::isfinite(s.usd_per_message)) {
            throw InvalidInput("per-message cost must be finite", "cost.per_message");
          }
          return s.usd_per_message;
        } else if constexpr (std::is_same_v<T, CostFromPreset>) {
          return presets.per_message_cost(s.name);
        } else if constexpr (std::is_same_v<T, CostSelfHosted>) {
          return self_hosted_cost_per_inference(profile_of(s, presets));
        } else if constexpr (std::is_same_v<T, CostApi>) {
          return api_cost_per_message(pricing_of(s.pricing, presets), tokens_per_message(s.shape));
        } else {
          double tokens = 0.0;
          if (s.monthly_tokens) {
            tokens = *s.monthly_tokens;
          } else {
            if (!(s.units_per_month >= 0.0)) {
              throw InvalidInput("units_per_month must be non-negative", "cost.monthly");
            }
            tokens = tokens_per_message(*s.shape) * s.units_per_month;
          }
          const double usage = api_cost_per_message(pricing_of(s.pricing, presets), tokens);
          double overhead = s.extra_monthly_overhead;
          if (s.include_rnd_overhead) {
            if (!scenario.rnd) {
              throw InvalidInput("include_rnd_overhead requires an rnd block", "rnd");
            }
            overhead += monthly_rnd_cost(*scenario.rnd);
          }
          return cost_per_message_with_overheads(usage, overhead,
                                                 scenario.volumes.messages_per_month);
        }
      },
      source);
}

void validate(const Scenario& scenario, const PresetStore& presets) {
  validate(scenario.economics);
  validate(scenario.timings);
  if (!(scenario.volumes.annual_messages >= 0.0)) {
    throw InvalidInput("annual_messages must be non-negative", "volumes.annual_messages");
  }
  if (!(scenario.volumes.messages_per_month >= 0.0)) {
    throw InvalidInput("messages_per_month must be non-negative", "volumes.messages_per_month");
  }
  if (scenario.rnd) {
    validate(*scenario.rnd);
    if (!(scenario.volumes.messages_per_month > 0.0)) {
      throw InvalidInput("break-even analysis needs a positive messages_per_month",
                         "volumes.messages_per_month");
    }
  }
  if (scenario.models.empty()) throw InvalidInput("scenario has no models", "models");
  for (std::size_t i = 0; i < scenario.models.size(); ++i) {
    const ModelSpec& m = scenario.models[i];
    if (m.model_id.empty()) {
      throw InvalidInput("model_id must not be empty", "models[" + std::to_string(i) + "]");
    }
    checked_usage(resolve_usage(m.usage, presets), scenario.simplex);
    resolve_cost(m.cost, scenario, presets);
  }
}

Report evaluate_scenario(const Scenario& scenario, const PresetStore& presets) {
  validate(scenario, presets);
  Report report;
  report.scenario_name = scenario.name;
  report.preset_version = presets.version();
  report.scenario = scenario;

  const ActionSavings savings = per_action_savings(scenario.economics, scenario.timings);
  for (const ModelSpec& m : scenario.models) {
    ReportRow row;
    row.model_id = m.model_id;
    row.usage = resolve_usage(m.usage, presets, &row.ppl);
    row.extrapolated = row.ppl.has_value();
    row.cost_per_message = resolve_cost(m.cost, scenario, presets);
    const EncsResult result = encs(row.usage, savings, row.cost_per_message, scenario.simplex);
    row.usage = checked_usage(row.usage, scenario.simplex);
    row.gross_savings = result.gross_savings;
    row.encs_per_message = result.per_message;
    row.encs_per_year = annualize(result.per_message, scenario.volumes.annual_messages);

    if (scenario.rnd) {
      row.per_message_maintenance =
          per_message_maintenance(*scenario.rnd, scenario.volumes.messages_per_month);
      try {
        const BreakEvenCount count = messages_to_break_even(
            scenario.rnd->build_cost, row.encs_per_message, row.per_message_maintenance);
        row.break_even = BreakEvenResult{
            count.exact, count.ceiling,
            time_to_break_even(count.exact, scenario.volumes.messages_per_month)};
        row.break_even_status = BreakEvenStatus::kBreaksEven;
      } catch (const NeverBreaksEven&) {
        row.break_even_status = BreakEvenStatus::kNever;
      }
    }
    report.notes.push_back(m.model_id + ": " + describe_usage(m.usage));
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string emit_scenario(const Scenario& scenario) {
  return json::encode(scenario).dump(2) + "\n";
}

Scenario parse_scenario(std::string_view json_text) {
  return json::decode_scenario(json::parse(json_text));
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open scenario file: " + path, "scenario");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    return json::encode(report).dump(2) + "\n";
  }
  bool with_break_even = false;
  for (const auto& r : report.rows) {
    with_break_even |= r.break_even_status != BreakEvenStatus::kNotApplicable;
  }
  std::string out = "model_id,encs_cents_per_message,encs_usd_per_year";
  if (with_break_even) out += ",break_even_messages,break_even_months";
  out += "\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.model_id) + "," + fixed(100.0 * r.encs_per_message, 2) + "," +
           fixed(r.encs_per_year, 0);
    if (with_break_even) {
      switch (r.break_even_status) {
        case BreakEvenStatus::kBreaksEven:
          out += "," + fixed(r.break_even->messages_ceiling, 0) + "," +
                 fixed(r.break_even->months, 2);
          break;
        case BreakEvenStatus::kNever: out += ",never,never"; break;
        case BreakEvenStatus::kNotApplicable: out += ",,"; break;
      }
    }
    out += "\n";
  }
  return out;
}

std::string emit_curve_csv(const BreakEvenCurve& curve) {
  std::string out = "messages,spend,spend_no_maintenance,labor_offset\n";
  for (const auto& p : curve.points) {
    out += fixed(p.messages, 0) + "," + fixed(p.spend, 2) + "," +
           fixed(p.spend_no_maintenance, 2) + "," + fixed(p.labor_offset, 2) + "\n";
  }
  return out;
}

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::kMinAgentTurns: return "min-agent-turns";
    case FilterReason::kHumanBotRatio: return "human-bot-ratio";
    case FilterReason::kQualityScore: return "quality-score";
  }
  return "min-agent-turns";
}

FilterOutcome dataset_filter(const std::vector<ConversationMeta>& metas,
                             const FilterConfig& config) {
  FilterOutcome out;
  for (const auto& m : metas) {
    if (m.agent_turns < config.min_agent_turns) {
      out.rejected.emplace_back(m, FilterReason::kMinAgentTurns);
    } else if (!(m.human_agent_messages > m.bot_messages)) {
      out.rejected.emplace_back(m, FilterReason::kHumanBotRatio);
    } else if (config.strict_quality ? !(m.quality_score > config.quality_threshold)
                                     : !(m.quality_score >= config.quality_threshold)) {
      out.rejected.emplace_back(m, FilterReason::kQualityScore);
    } else {
      out.kept.push_back(m);
    }
  }
  return out;
}

}  // namespace encs
