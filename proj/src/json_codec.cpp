#include "encs/json_codec.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "encs/error.hpp"

namespace encs::json {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Reads keys from one JSON object and rejects any it did not consume.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw InvalidInput("expected an object", path_.empty() ? "$" : path_);
    }
    allow("note");
  }

  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  bool has(const std::string& key) {
    allow(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& at(const std::string& key) {
    if (!has(key)) throw InvalidInput("missing required field", join(path_, key));
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw InvalidInput("expected a number", join(path_, key));
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  int integer(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw InvalidInput("expected an integer", join(path_, key));
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw InvalidInput("expected a string", join(path_, key));
    return v.get<std::string>();
  }

  std::string string_or(const std::string& key, std::string fallback) {
    return has(key) ? string(key) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw InvalidInput("expected a boolean", join(path_, key));
    return v.get<bool>();
  }

  std::string child(const std::string& key) const { return join(path_, key); }

  void allow(const std::string& key) { seen_.insert(key); }

  // Call once every field has been read.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw InvalidInput("unknown field", join(path_, key));
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json named_or_inline(const std::variant<NamedRef, T>& v) {
  if (const auto* ref = std::get_if<NamedRef>(&v)) return ref->name;
  return encode(std::get<T>(v));
}

ServingProfile decode_profile(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  ServingProfile p;
  p.model = r.string_or("model", "");
  p.latency_per_inference = r.number("latency_per_inference");
  p.throughput = r.number_or("throughput", 0.0);
  p.gpu = decode_gpu(r.at("gpu"), r.child("gpu"));
  r.finish();
  return p;
}

std::variant<NamedRef, ApiPricing> decode_pricing_ref(const Json& j, const std::string& path) {
  if (j.is_string()) return NamedRef{j.get<std::string>()};
  return decode_api_pricing(j, path);
}

UsageSource decode_usage_source(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  UsageSource source;
  const int kinds = static_cast<int>(r.has("distribution")) + static_cast<int>(r.has("preset")) +
                    static_cast<int>(r.has("perplexity"));
  if (kinds != 1) {
    throw InvalidInput("usage needs exactly one of distribution, preset or perplexity", path);
  }
  if (r.has("distribution")) {
    source = UsageFromDistribution{decode_usage(r.at("distribution"), r.child("distribution"))};
  } else if (r.has("preset")) {
    source = UsageFromPreset{r.string("preset")};
  } else {
    UsageFromPerplexity p;
    p.ppl = r.number("perplexity");
    const Json& c = r.at("coefficients");
    if (c.is_string()) {
      p.coefficients = NamedRef{c.get<std::string>()};
    } else {
      p.coefficients = decode_coefficients(c, r.child("coefficients"));
    }
    source = std::move(p);
  }
  r.finish();
  return source;
}

CostSource decode_cost_source(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const char* kinds[] = {"per_message", "preset", "self_hosted", "api", "monthly"};
  int count = 0;
  for (const char* k : kinds) count += static_cast<int>(r.has(k));
  if (count != 1) {
    throw InvalidInput(
        "cost needs exactly one of per_message, preset, self_hosted, api or monthly", path);
  }
  CostSource source;
  if (r.has("per_message")) {
    source = CostExplicit{r.number("per_message")};
  } else if (r.has("preset")) {
    source = CostFromPreset{r.string("preset")};
  } else if (r.has("self_hosted")) {
    ObjectReader s(r.at("self_hosted"), r.child("self_hosted"));
    const Json& p = s.at("profile");
    CostSelfHosted cost;
    if (p.is_string()) {
      cost.profile = NamedRef{p.get<std::string>()};
    } else {
      cost.profile = decode_profile(p, s.child("profile"));
    }
    s.finish();
    source = std::move(cost);
  } else if (r.has("api")) {
    ObjectReader a(r.at("api"), r.child("api"));
    CostApi cost;
    cost.pricing = decode_pricing_ref(a.at("pricing"), a.child("pricing"));
    cost.shape = decode_shape(a.at("shape"), a.child("shape"));
    a.finish();
    source = std::move(cost);
  } else {
    ObjectReader m(r.at("monthly"), r.child("monthly"));
    CostMonthly cost;
    cost.pricing = decode_pricing_ref(m.at("pricing"), m.child("pricing"));
    cost.monthly_tokens = m.optional_number("monthly_tokens");
    if (m.has("shape")) cost.shape = decode_shape(m.at("shape"), m.child("shape"));
    cost.units_per_month = m.number_or("units_per_month", 0.0);
    cost.extra_monthly_overhead = m.number_or("extra_monthly_overhead", 0.0);
    cost.include_rnd_overhead = m.boolean_or("include_rnd_overhead", false);
    if (cost.monthly_tokens.has_value() == cost.shape.has_value()) {
      throw InvalidInput("monthly cost needs exactly one of monthly_tokens or shape",
                         r.child("monthly"));
    }
    m.finish();
    source = std::move(cost);
  }
  r.finish();
  return source;
}

Json encode_usage_source(const UsageSource& source) {
  Json j = Json::object();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UsageFromDistribution>) {
          j["distribution"] = encode(s.distribution);
        } else if constexpr (std::is_same_v<T, UsageFromPreset>) {
          j["preset"] = s.name;
        } else {
          j["perplexity"] = s.ppl;
          j["coefficients"] = named_or_inline(s.coefficients);
        }
      },
      source);
  return j;
}

Json encode_cost_source(const CostSource& source) {
  Json j = Json::object();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CostExplicit>) {
          j["per_message"] = s.usd_per_message;
        } else if constexpr (std::is_same_v<T, CostFromPreset>) {
          j["preset"] = s.name;
        } else if constexpr (std::is_same_v<T, CostSelfHosted>) {
          j["self_hosted"] = Json{{"profile", named_or_inline(s.profile)}};
        } else if constexpr (std::is_same_v<T, CostApi>) {
          j["api"] = Json{{"pricing", named_or_inline(s.pricing)}, {"shape", encode(s.shape)}};
        } else {
          Json m = Json::object();
          m["pricing"] = named_or_inline(s.pricing);
          if (s.monthly_tokens) m["monthly_tokens"] = *s.monthly_tokens;
          if (s.shape) m["shape"] = encode(*s.shape);
          m["units_per_month"] = s.units_per_month;
          m["extra_monthly_overhead"] = s.extra_monthly_overhead;
          m["include_rnd_overhead"] = s.include_rnd_overhead;
          j["monthly"] = std::move(m);
        }
      },
      source);
  return j;
}

std::string_view to_string(BreakEvenStatus status) {
  switch (status) {
    case BreakEvenStatus::kNotApplicable: return "not_applicable";
    case BreakEvenStatus::kBreaksEven: return "breaks_even";
    case BreakEvenStatus::kNever: return "never";
  }
  return "not_applicable";
}

}  // namespace

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidJson, std::string("malformed JSON: ") + e.what());
  }
}

Json encode(const AgentEconomics& v) {
  return {{"hourly_rate", v.hourly_rate}, {"baseline_response_time", v.baseline_response_time}};
}

Json encode(const ActionTimings& v) {
  return {{"t_use", v.t_use}, {"t_edit", v.t_edit}, {"t_ignore", v.t_ignore}};
}

Json encode(const ActionSavings& v) {
  return {{"s_use", v.s_use}, {"s_edit", v.s_edit}, {"s_ignore", v.s_ignore}};
}

Json encode(const UsageDistribution& v) {
  return {{"p_use", v.p_use}, {"p_edit", v.p_edit}, {"p_ignore", v.p_ignore}};
}

Json encode(const SimplexPolicy& v) {
  return {{"tolerance", v.tolerance},
          {"normalization",
           v.normalization == Normalization::kAsGiven ? "as_given" : "renormalize"}};
}

Json encode(const EncsResult& v) {
  return {{"per_message", v.per_message},
          {"gross_savings", v.gross_savings},
          {"generation_cost", v.generation_cost},
          {"breakdown",
           {{"use", v.breakdown.use}, {"edit", v.breakdown.edit}, {"ignore", v.breakdown.ignore}}}};
}

Json encode(const SimulationResult& v) {
  return {{"mean", v.mean}, {"std_error", v.std_error}, {"n", v.n}};
}

Json encode(const GpuPricing& v) {
  Json j = Json::object();
  if (!v.name.empty()) j["name"] = v.name;
  j["monthly_cost"] = v.monthly_cost;
  j["billed_hours_per_month"] = v.billed_hours_per_month;
  return j;
}

Json encode(const ServingProfile& v) {
  return {{"model", v.model},
          {"latency_per_inference", v.latency_per_inference},
          {"throughput", v.throughput},
          {"gpu", encode(v.gpu)}};
}

Json encode(const ApiPricing& v) {
  Json j = {{"usd_per_1k_tokens", v.usd_per_1k_tokens}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

Json encode(const MessageShape& v) {
  Json j = {{"avg_chars_per_message", v.avg_chars_per_message},
            {"chars_per_token", v.chars_per_token}};
  if (v.tokens_per_message) j["tokens_per_message"] = *v.tokens_per_message;
  return j;
}

Json encode(const LinearModel& v) {
  Json j = {{"slope", v.slope}, {"intercept", v.intercept}};
  if (v.n > 0) {
    j["n"] = v.n;
    j["r_squared"] = v.r_squared;
    j["f_statistic"] = number_or_null(v.f_statistic);
    j["p_value"] = v.p_value;
  }
  return j;
}

Json encode(const RuCoefficients& v) {
  return {{"use", encode(v.use)}, {"edit", encode(v.edit)}, {"ignore", encode(v.ignore)}};
}

Json encode(const RuPrediction& v) {
  return {{"p_use", v.p_use},       {"p_edit", v.p_edit},     {"p_ignore", v.p_ignore},
          {"raw_sum", v.raw_sum},   {"raw_use", v.raw_use},   {"raw_edit", v.raw_edit},
          {"raw_ignore", v.raw_ignore}};
}

Json encode(const RndCost& v) {
  Json j = {{"build_cost", v.build_cost},
            {"amortization_months", v.amortization_months},
            {"annual_maintenance", v.annual_maintenance}};
  if (v.per_message_maintenance) j["per_message_maintenance"] = *v.per_message_maintenance;
  return j;
}

Json encode(const BreakEvenResult& v) {
  return {{"messages", v.messages}, {"messages_ceiling", v.messages_ceiling}, {"months", v.months}};
}

Json encode(const LaborComparison& v) {
  return {{"labor_without", v.labor_without}, {"labor_with", v.labor_with},
          {"total_with", v.total_with},       {"saving", v.saving},
          {"saving_pct", v.saving_pct},       {"time_with", v.time_with},
          {"time_saving_pct", v.time_saving_pct}};
}

Json encode(const FitObservation& v) {
  return {{"model_id", v.model_id}, {"conversation_id", v.conversation_id}, {"ppl", v.ppl},
          {"use_pct", v.use_pct},   {"edit_pct", v.edit_pct},               {"ignore_pct", v.ignore_pct}};
}

Json encode(const FitResult& v) {
  Json j = Json::object();
  j["observations"] = v.observations;
  j["coefficients"] = encode(v.pooled);
  Json removed = Json::array();
  for (const auto& o : v.removed) removed.push_back(encode(o));
  j["removed_outliers"] = std::move(removed);
  Json per_model = Json::object();
  for (const auto& [model, c] : v.per_model) per_model[model] = c ? encode(*c) : Json(nullptr);
  j["per_model"] = std::move(per_model);
  return j;
}

Json encode(const BreakEvenCurve& v) {
  Json points = Json::array();
  for (const auto& p : v.points) {
    points.push_back({{"messages", p.messages},
                      {"spend", p.spend},
                      {"spend_no_maintenance", p.spend_no_maintenance},
                      {"labor_offset", p.labor_offset}});
  }
  return {{"points", std::move(points)},
          {"crossing", v.crossing ? Json(*v.crossing) : Json(nullptr)}};
}

Json encode(const Scenario& v) {
  Json j = Json::object();
  j["schema_version"] = v.schema_version;
  j["name"] = v.name;
  if (!v.description.empty()) j["description"] = v.description;
  j["economics"] = encode(v.economics);
  j["timings"] = encode(v.timings);
  j["simplex"] = encode(v.simplex);
  j["volumes"] = {{"messages_per_month", v.volumes.messages_per_month},
                  {"annual_messages", v.volumes.annual_messages}};
  if (v.rnd) j["rnd"] = encode(*v.rnd);
  Json models = Json::array();
  for (const auto& m : v.models) {
    models.push_back({{"model_id", m.model_id},
                      {"usage", encode_usage_source(m.usage)},
                      {"cost", encode_cost_source(m.cost)}});
  }
  j["models"] = std::move(models);
  return j;
}

Json encode(const Report& v) {
  Json j = Json::object();
  j["scenario"] = v.scenario_name;
  j["preset_version"] = v.preset_version;
  Json rows = Json::array();
  for (const auto& r : v.rows) {
    Json row = Json::object();
    row["model_id"] = r.model_id;
    row["ppl"] = r.ppl ? Json(*r.ppl) : Json(nullptr);
    row["extrapolated"] = r.extrapolated;
    row["p_use"] = r.usage.p_use;
    row["p_edit"] = r.usage.p_edit;
    row["p_ignore"] = r.usage.p_ignore;
    row["cost_per_message"] = r.cost_per_message;
    row["gross_savings"] = r.gross_savings;
    row["encs_per_message"] = r.encs_per_message;
    row["encs_per_year"] = r.encs_per_year;
    row["break_even_status"] = to_string(r.break_even_status);
    if (r.break_even_status == BreakEvenStatus::kNotApplicable) {
      row["break_even_messages"] = nullptr;
      row["break_even_months"] = nullptr;
    } else if (r.break_even_status == BreakEvenStatus::kNever) {
      row["break_even_messages"] = "never";
      row["break_even_months"] = "never";
    } else {
      row["break_even_messages"] = r.break_even->messages;
      row["break_even_messages_ceiling"] = r.break_even->messages_ceiling;
      row["break_even_months"] = r.break_even->months;
    }
    if (r.break_even_status != BreakEvenStatus::kNotApplicable) {
      row["per_message_maintenance"] = r.per_message_maintenance;
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["notes"] = v.notes;
  j["scenario_echo"] = encode(v.scenario);
  return j;
}

AgentEconomics decode_economics(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  AgentEconomics v{r.number("hourly_rate"), r.number("baseline_response_time")};
  r.finish();
  return v;
}

ActionTimings decode_timings(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  ActionTimings v{r.number("t_use"), r.number("t_edit"), r.number("t_ignore")};
  r.finish();
  return v;
}

UsageDistribution decode_usage(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  UsageDistribution v{r.number("p_use"), r.number("p_edit"), r.number("p_ignore")};
  r.finish();
  return v;
}

SimplexPolicy decode_simplex(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  SimplexPolicy v;
  v.tolerance = r.number_or("tolerance", kDefaultSimplexTolerance);
  const std::string mode = r.string_or("normalization", "renormalize");
  if (mode == "renormalize") {
    v.normalization = Normalization::kRenormalize;
  } else if (mode == "as_given") {
    v.normalization = Normalization::kAsGiven;
  } else {
    throw InvalidInput("normalization must be renormalize or as_given", r.child("normalization"));
  }
  r.finish();
  return v;
}

GpuPricing decode_gpu(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  GpuPricing v;
  v.name = r.string_or("name", "");
  v.monthly_cost = r.number("monthly_cost");
  v.billed_hours_per_month = r.number("billed_hours_per_month");
  r.finish();
  return v;
}

ApiPricing decode_api_pricing(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  ApiPricing v;
  v.usd_per_1k_tokens = r.number("usd_per_1k_tokens");
  v.note = r.string_or("note", "");
  r.finish();
  return v;
}

MessageShape decode_shape(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  MessageShape v;
  v.avg_chars_per_message = r.number_or("avg_chars_per_message", 0.0);
  v.chars_per_token = r.number_or("chars_per_token", kDefaultCharsPerToken);
  v.tokens_per_message = r.optional_number("tokens_per_message");
  r.finish();
  return v;
}

LinearModel decode_linear_model(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  LinearModel v;
  v.slope = r.number("slope");
  v.intercept = r.number("intercept");
  if (r.has("n")) {
    v.n = static_cast<std::size_t>(r.integer("n"));
    v.r_squared = r.number_or("r_squared", 0.0);
    r.allow("f_statistic");
    v.f_statistic = r.has("f_statistic") ? r.number("f_statistic")
                                         : std::numeric_limits<double>::infinity();
    v.p_value = r.number_or("p_value", 1.0);
  }
  r.finish();
  return v;
}

RuCoefficients decode_coefficients(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  RuCoefficients v;
  v.use = decode_linear_model(r.at("use"), r.child("use"));
  v.edit = decode_linear_model(r.at("edit"), r.child("edit"));
  v.ignore = decode_linear_model(r.at("ignore"), r.child("ignore"));
  r.finish();
  return v;
}

RndCost decode_rnd(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  RndCost v;
  v.build_cost = r.number("build_cost");
  v.amortization_months = r.integer("amortization_months");
  v.annual_maintenance = r.number_or("annual_maintenance", 0.0);
  v.per_message_maintenance = r.optional_number("per_message_maintenance");
  r.finish();
  return v;
}

Scenario decode_scenario(const Json& j) {
  ObjectReader r(j, "");
  Scenario s;
  s.schema_version = r.has("schema_version") ? r.integer("schema_version") : kScenarioSchemaVersion;
  if (s.schema_version != kScenarioSchemaVersion) {
    throw InvalidInput("unsupported schema_version " + std::to_string(s.schema_version),
                       "schema_version");
  }
  s.name = r.string_or("name", "");
  s.description = r.string_or("description", "");
  s.economics = decode_economics(r.at("economics"), "economics");
  s.timings = decode_timings(r.at("timings"), "timings");
  if (r.has("simplex")) s.simplex = decode_simplex(r.at("simplex"), "simplex");
  {
    ObjectReader v(r.at("volumes"), "volumes");
    s.volumes.messages_per_month = v.number_or("messages_per_month", 0.0);
    s.volumes.annual_messages = v.number_or("annual_messages", 0.0);
    v.finish();
  }
  if (r.has("rnd")) s.rnd = decode_rnd(r.at("rnd"), "rnd");
  const Json& models = r.at("models");
  if (!models.is_array()) throw InvalidInput("expected an array", "models");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string path = "models[" + std::to_string(i) + "]";
    ObjectReader m(models[i], path);
    ModelSpec spec;
    spec.model_id = m.string("model_id");
    spec.usage = decode_usage_source(m.at("usage"), m.child("usage"));
    spec.cost = decode_cost_source(m.at("cost"), m.child("cost"));
    m.finish();
    s.models.push_back(std::move(spec));
  }
  r.finish();
  return s;
}

FitObservation decode_observation(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  FitObservation o;
  o.model_id = r.string_or("model_id", "");
  o.conversation_id = r.string_or("conversation_id", "");
  o.ppl = r.number("ppl");
  o.use_pct = r.number("use_pct");
  o.edit_pct = r.number("edit_pct");
  o.ignore_pct = r.number("ignore_pct");
  r.finish();
  return o;
}

FitOptions decode_fit_options(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  FitOptions o;
  o.iqr_k = r.number_or("iqr_k", kTukeyMultiplier);
  const std::string quantile = r.string_or("quantile", "type7");
  if (quantile == "type7") {
    o.quantile = QuantileMethod::kType7;
  } else if (quantile == "type6") {
    o.quantile = QuantileMethod::kType6;
  } else {
    throw InvalidInput("quantile must be type7 or type6", r.child("quantile"));
  }
  const std::string outliers = r.string_or("outliers", "pooled");
  if (outliers == "pooled") {
    o.outliers = OutlierMode::kPooled;
  } else if (outliers == "per-model") {
    o.outliers = OutlierMode::kPerModel;
  } else if (outliers == "none") {
    o.outliers = OutlierMode::kNone;
  } else {
    throw InvalidInput("outliers must be pooled, per-model or none", r.child("outliers"));
  }
  r.finish();
  return o;
}

}  // namespace encs::json
