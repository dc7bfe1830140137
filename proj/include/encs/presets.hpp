#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "encs/breakeven.hpp"
#include "encs/core_cost.hpp"
#include "encs/inference_cost.hpp"
#include "encs/scenario.hpp"
#include "encs/usability_model.hpp"

// Named, versioned constants: pricing tables, usage distributions, coefficient
// sets and whole scenarios. The built-in store is compiled from data/presets.

namespace encs {

struct PresetInfo {
  std::string kind;  // "gpu", "serving_profile", "coefficients", "scenario", ...
  std::string name;
  std::string note;
};

class PresetStore {
 public:
  // main_json follows data/presets/presets.json; scenarios are canonical scenario JSON.
  PresetStore(std::string_view main_json, const std::vector<std::string>& scenario_jsons);

  const std::string& version() const { return version_; }

  const AgentEconomics& economics(const std::string& name) const;
  const ActionTimings& timings(const std::string& name) const;
  const UsageDistribution& usage(const std::string& name) const;
  const GpuPricing& gpu(const std::string& name) const;
  // GPU reference already resolved.
  const ServingProfile& serving_profile(const std::string& name) const;
  const ApiPricing& api_pricing(const std::string& name) const;
  double per_message_cost(const std::string& name) const;
  const RuCoefficients& coefficients(const std::string& name) const;
  const RndCost& rnd(const std::string& name) const;
  const Scenario& scenario(const std::string& name) const;
  double reference(const std::string& group, const std::string& key) const;

  std::vector<PresetInfo> list() const;
  // The raw main preset document, for clients that display it.
  const std::string& main_json() const { return main_json_; }

 private:
  std::string version_;
  std::string main_json_;
  std::map<std::string, AgentEconomics> economics_;
  std::map<std::string, ActionTimings> timings_;
  std::map<std::string, UsageDistribution> usage_;
  std::map<std::string, GpuPricing> gpus_;
  std::map<std::string, ServingProfile> profiles_;
  std::map<std::string, ApiPricing> api_;
  std::map<std::string, double> per_message_;
  std::map<std::string, RuCoefficients> coefficients_;
  std::map<std::string, RndCost> rnd_;
  std::map<std::string, Scenario> scenarios_;
  std::map<std::string, std::map<std::string, double>> reference_;
  std::vector<PresetInfo> info_;
};

const PresetStore& builtin_presets();

}  // namespace encs
