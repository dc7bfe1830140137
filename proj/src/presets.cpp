#include "encs/presets.hpp"

#include "encs/error.hpp"
#include "encs/json_codec.hpp"
#include "preset_data.hpp"

namespace encs {

namespace {

template <typename Map>
const typename Map::mapped_type& find_or_throw(const Map& map, const std::string& kind,
                                               const std::string& name) {
  const auto it = map.find(name);
  if (it == map.end()) throw UnknownPreset(kind + " '" + name + "'");
  return it->second;
}

std::string note_of(const json::Json& j) {
  return j.contains("note") && j.at("note").is_string() ? j.at("note").get<std::string>() : "";
}

}  // namespace

PresetStore::PresetStore(std::string_view main_json,
                         const std::vector<std::string>& scenario_jsons)
    : main_json_(main_json) {
  const json::Json doc = json::parse(main_json);
  version_ = doc.at("version").get<std::string>();

  const auto section = [&](const char* key) -> const json::Json& {
    static const json::Json empty = json::Json::object();
    return doc.contains(key) ? doc.at(key) : empty;
  };
  const auto record = [&](const char* kind, const std::string& name, const json::Json& j) {
    info_.push_back({kind, name, note_of(j)});
  };

  for (const auto& [name, j] : section("economics").items()) {
    economics_[name] = json::decode_economics(j, std::string("economics.") + name);
    record("economics", name, j);
  }
  for (const auto& [name, j] : section("timings").items()) {
    timings_[name] = json::decode_timings(j, std::string("timings.") + name);
    record("timings", name, j);
  }
  for (const auto& [name, j] : section("usage").items()) {
    usage_[name] = json::decode_usage(j, std::string("usage.") + name);
    record("usage", name, j);
  }
  for (const auto& [name, j] : section("gpus").items()) {
    GpuPricing gpu = json::decode_gpu(j, std::string("gpus.") + name);
    gpu.name = name;
    gpus_[name] = gpu;
    record("gpu", name, j);
  }
  for (const auto& [name, j] : section("serving_profiles").items()) {
    ServingProfile p;
    p.model = j.value("model", "");
    p.latency_per_inference = j.at("latency_per_inference").get<double>();
    p.throughput = j.value("throughput", 0.0);
    p.gpu = find_or_throw(gpus_, "gpu", j.at("gpu").get<std::string>());
    validate(p);
    profiles_[name] = p;
    record("serving_profile", name, j);
  }
  for (const auto& [name, j] : section("api_pricing").items()) {
    api_[name] = json::decode_api_pricing(j, std::string("api_pricing.") + name);
    record("api_pricing", name, j);
  }
  for (const auto& [name, j] : section("per_message_costs").items()) {
    per_message_[name] = j.at("usd").get<double>();
    record("per_message_cost", name, j);
  }
  for (const auto& [name, j] : section("coefficients").items()) {
    coefficients_[name] = json::decode_coefficients(j, std::string("coefficients.") + name);
    record("coefficients", name, j);
  }
  for (const auto& [name, j] : section("rnd").items()) {
    rnd_[name] = json::decode_rnd(j, std::string("rnd.") + name);
    record("rnd", name, j);
  }
  for (const auto& [group, entries] : section("reference").items()) {
    for (const auto& [key, value] : entries.items()) {
      reference_[group][key] = value.get<double>();
    }
  }
  for (const auto& text : scenario_jsons) {
    Scenario s = parse_scenario(text);
    info_.push_back({"scenario", s.name, s.description});
    scenarios_[s.name] = std::move(s);
  }
  for (const auto& [name, s] : scenarios_) validate(s, *this);
}

const AgentEconomics& PresetStore::economics(const std::string& name) const {
  return find_or_throw(economics_, "economics", name);
}
const ActionTimings& PresetStore::timings(const std::string& name) const {
  return find_or_throw(timings_, "timings", name);
}
const UsageDistribution& PresetStore::usage(const std::string& name) const {
  return find_or_throw(usage_, "usage", name);
}
const GpuPricing& PresetStore::gpu(const std::string& name) const {
  return find_or_throw(gpus_, "gpu", name);
}
const ServingProfile& PresetStore::serving_profile(const std::string& name) const {
  return find_or_throw(profiles_, "serving profile", name);
}
const ApiPricing& PresetStore::api_pricing(const std::string& name) const {
  return find_or_throw(api_, "api pricing", name);
}
double PresetStore::per_message_cost(const std::string& name) const {
  return find_or_throw(per_message_, "per-message cost", name);
}
const RuCoefficients& PresetStore::coefficients(const std::string& name) const {
  return find_or_throw(coefficients_, "coefficient set", name);
}
const RndCost& PresetStore::rnd(const std::string& name) const {
  return find_or_throw(rnd_, "rnd", name);
}
const Scenario& PresetStore::scenario(const std::string& name) const {
  return find_or_throw(scenarios_, "scenario", name);
}
double PresetStore::reference(const std::string& group, const std::string& key) const {
  return find_or_throw(find_or_throw(reference_, "reference group", group), "reference", key);
}

std::vector<PresetInfo> PresetStore::list() const { return info_; }

const PresetStore& builtin_presets() {
  static const PresetStore store = [] {
    std::vector<std::string> scenarios;
    for (std::size_t i = 0; i < detail::kPresetScenarioCount; ++i) {
      scenarios.emplace_back(detail::kPresetScenarios[i]);
    }
    return PresetStore(detail::kPresetMain, scenarios);
  }();
  return store;
}

}  // namespace encs
