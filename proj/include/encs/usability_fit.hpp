#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "encs/annotation_stats.hpp"
#include "encs/usability_model.hpp"

// Fits perplexity -> use/edit/ignore regressions from annotated responses.
// Each (conversation, model) response is one observation: x is its
// perplexity, y is the percentage of annotators choosing each action.

namespace encs {

enum class OutlierMode {
  kPooled,    // one set of IQR fences over all responses
  kPerModel,  // fences computed within each model's responses
  kNone,
};

struct FitOptions {
  double iqr_k = kTukeyMultiplier;
  QuantileMethod quantile = QuantileMethod::kType7;
  OutlierMode outliers = OutlierMode::kPooled;
};

struct FitObservation {
  std::string model_id;
  std::string conversation_id;
  double ppl = 0.0;
  double use_pct = 0.0;
  double edit_pct = 0.0;
  double ignore_pct = 0.0;
};

struct FitResult {
  RuCoefficients pooled;
  std::size_t observations = 0;
  std::vector<FitObservation> removed;
  // Per-model fits with per-model fences; empty when a model's subset is degenerate.
  std::map<std::string, std::optional<RuCoefficients>> per_model;
};

// Joins annotations with perplexities; responses with no perplexity are skipped.
std::vector<FitObservation> build_observations(std::span<const AnnotationRecord> annotations,
                                               std::span<const PerplexitySample> samples);

FitResult fit_usability(std::span<const FitObservation> observations,
                        const FitOptions& options = {});

}  // namespace encs
