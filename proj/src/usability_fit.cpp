#include "encs/usability_fit.hpp"

#include <utility>

#include "encs/error.hpp"

namespace encs {

namespace {

RuCoefficients fit_three(std::span<const FitObservation> obs) {
  std::vector<double> x;
  std::vector<double> use;
  std::vector<double> edit;
  std::vector<double> ignore;
  for (const auto& o : obs) {
    x.push_back(o.ppl);
    use.push_back(o.use_pct);
    edit.push_back(o.edit_pct);
    ignore.push_back(o.ignore_pct);
  }
  return {ols_fit(x, use), ols_fit(x, edit), ols_fit(x, ignore)};
}

// Splits obs into (kept, removed) by IQR fences over their perplexities.
std::pair<std::vector<FitObservation>, std::vector<FitObservation>> apply_fences(
    std::span<const FitObservation> obs, const FitOptions& options) {
  std::vector<FitObservation> kept;
  std::vector<FitObservation> removed;
  if (options.outliers == OutlierMode::kNone || obs.empty()) {
    kept.assign(obs.begin(), obs.end());
    return {kept, removed};
  }
  std::vector<double> ppl;
  for (const auto& o : obs) ppl.push_back(o.ppl);
  const Fences f = iqr_fences(ppl, options.iqr_k, options.quantile);
  for (const auto& o : obs) {
    (o.ppl >= f.lower && o.ppl <= f.upper ? kept : removed).push_back(o);
  }
  return {kept, removed};
}

std::map<std::string, std::vector<FitObservation>> by_model(
    std::span<const FitObservation> obs) {
  std::map<std::string, std::vector<FitObservation>> groups;
  for (const auto& o : obs) groups[o.model_id].push_back(o);
  return groups;
}

}  // namespace

std::vector<FitObservation> build_observations(std::span<const AnnotationRecord> annotations,
                                               std::span<const PerplexitySample> samples) {
  std::map<std::pair<std::string, std::string>, double> ppl;
  for (const auto& s : samples) {
    if (s.ppl) ppl[{s.conversation_id, s.model_id}] = *s.ppl;
  }
  std::map<std::pair<std::string, std::string>, std::array<int, kRuCategoryCount>> counts;
  for (const auto& a : annotations) {
    ++counts[{a.conversation_id, a.model_id}][static_cast<std::size_t>(to_category(a.label))];
  }
  std::vector<FitObservation> out;
  for (const auto& [key, c] : counts) {
    const auto it = ppl.find(key);
    if (it == ppl.end()) continue;
    const double total = c[0] + c[1] + c[2];
    out.push_back({key.second, key.first, it->second, 100.0 * c[0] / total,
                   100.0 * c[1] / total, 100.0 * c[2] / total});
  }
  return out;
}

FitResult fit_usability(std::span<const FitObservation> observations,
                        const FitOptions& options) {
  if (observations.empty()) throw InvalidInput("no observations to fit");
  FitResult result;
  std::vector<FitObservation> pooled_kept;
  if (options.outliers == OutlierMode::kPerModel) {
    for (auto& [model, group] : by_model(observations)) {
      auto [kept, removed] = apply_fences(group, options);
      pooled_kept.insert(pooled_kept.end(), kept.begin(), kept.end());
      result.removed.insert(result.removed.end(), removed.begin(), removed.end());
    }
  } else {
    auto [kept, removed] = apply_fences(observations, options);
    pooled_kept = std::move(kept);
    result.removed = std::move(removed);
  }
  result.pooled = fit_three(pooled_kept);
  result.observations = pooled_kept.size();

  FitOptions per_model_options = options;
  if (per_model_options.outliers == OutlierMode::kPooled) {
    per_model_options.outliers = OutlierMode::kPerModel;
  }
  for (auto& [model, group] : by_model(observations)) {
    auto kept = apply_fences(group, per_model_options).first;
    try {
      result.per_model[model] = fit_three(kept);
    } catch (const Error&) {
      result.per_model[model] = std::nullopt;
    }
  }
  return result;
}

}  // namespace encs
