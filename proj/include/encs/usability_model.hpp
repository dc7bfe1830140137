#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

// Perplexity of generated responses and the linear models that map it onto
// use/edit/ignore rates. Regressions are fitted on percentages (0-100);
// predictions are returned as probabilities.

namespace encs {

struct PerplexitySample {
  std::string model_id;
  std::string conversation_id;
  std::optional<double> ppl;  // empty when the model produced no response
};

struct LinearModel {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;
  double r_squared = 0.0;
  double f_statistic = 0.0;  // +inf when the fit is exact
  double p_value = 1.0;

  double operator()(double x) const { return intercept + slope * x; }

  bool operator==(const LinearModel&) const = default;
};

struct RuCoefficients {
  LinearModel use;
  LinearModel edit;
  LinearModel ignore;

  bool operator==(const RuCoefficients&) const = default;
};

struct RuPrediction {
  double p_use = 0.0;
  double p_edit = 0.0;
  double p_ignore = 0.0;
  double raw_sum = 0.0;  // percent, before clamping and renormalization
  double raw_use = 0.0;
  double raw_edit = 0.0;
  double raw_ignore = 0.0;
};

// Sample quantile estimators, numbered as in Hyndman & Fan.
enum class QuantileMethod {
  kType7,  // linear interpolation between order statistics, h = (n-1)p
  kType6,  // h = (n+1)p
};

struct Fences {
  double q1 = 0.0;
  double q3 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct IqrSplit {
  std::vector<double> kept;
  std::vector<double> removed;
};

inline constexpr double kTukeyMultiplier = 1.5;

double perplexity(std::span<const double> token_probs);

// Same quantity from natural-log token probabilities.
double perplexity_from_logprobs(std::span<const double> logprobs);

double mean_perplexity(std::span<const PerplexitySample> samples);

double quantile(std::span<const double> values, double p,
                QuantileMethod method = QuantileMethod::kType7);

Fences iqr_fences(std::span<const double> values, double k = kTukeyMultiplier,
                  QuantileMethod method = QuantileMethod::kType7);

IqrSplit iqr_filter(std::span<const double> values, double k = kTukeyMultiplier,
                    QuantileMethod method = QuantileMethod::kType7);

LinearModel ols_fit(std::span<const double> x, std::span<const double> y);

// Upper-tail probability of the F(d1, d2) distribution at f.
double f_distribution_sf(double f, double d1, double d2);

// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double x, double a, double b);

RuPrediction predict_ru(double ppl, const LinearModel& use, const LinearModel& edit,
                        const LinearModel& ignore);

inline RuPrediction predict_ru(double ppl, const RuCoefficients& c) {
  return predict_ru(ppl, c.use, c.edit, c.ignore);
}

}  // namespace encs
