#include "encs/usability_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "encs/error.hpp"

namespace encs {

double perplexity(std::span<const double> token_probs) {
  if (token_probs.empty()) {
    throw InvalidInput("perplexity of an empty token sequence is undefined", "probs");
  }
  double log_sum = 0.0;
  for (double p : token_probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw InvalidInput("token probabilities must lie in (0, 1]", "probs");
    }
    log_sum += std::log(p);
  }
  return std::exp(-log_sum / static_cast<double>(token_probs.size()));
}

double perplexity_from_logprobs(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw InvalidInput("perplexity of an empty token sequence is undefined", "logprobs");
  }
  double log_sum = 0.0;
  for (double lp : logprobs) {
    if (!(lp <= 0.0) || !std::isfinite(lp)) {
      throw InvalidInput("token log-probabilities must be finite and <= 0", "logprobs");
    }
    log_sum += lp;
  }
  return std::exp(-log_sum / static_cast<double>(logprobs.size()));
}

double mean_perplexity(std::span<const PerplexitySample> samples) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (!s.ppl) continue;
    total += *s.ppl;
    ++count;
  }
  if (count == 0) {
    throw InvalidInput("no non-missing perplexity samples");
  }
  return total / static_cast<double>(count);
}

double quantile(std::span<const double> values, double p, QuantileMethod method) {
  if (values.empty()) {
    throw InvalidInput("quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("quantile level must lie in [0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  // h is the 1-based fractional rank.
  double h = 0.0;
  switch (method) {
    case QuantileMethod::kType7: h = (n - 1.0) * p + 1.0; break;
    case QuantileMethod::kType6: h = (n + 1.0) * p; break;
  }
  h = std::clamp(h, 1.0, n);
  const double lo = std::floor(h);
  const auto lo_idx = static_cast<std::size_t>(lo) - 1;
  const std::size_t hi_idx = std::min(lo_idx + 1, sorted.size() - 1);
  return sorted[lo_idx] + (h - lo) * (sorted[hi_idx] - sorted[lo_idx]);
}

Fences iqr_fences(std::span<const double> values, double k, QuantileMethod method) {
  if (values.empty()) {
    throw InvalidInput("IQR filter needs at least one value");
  }
  if (!(k >= 0.0)) {
    throw InvalidInput("IQR multiplier must be non-negative", "k");
  }
  Fences f;
  f.q1 = quantile(values, 0.25, method);
  f.q3 = quantile(values, 0.75, method);
  const double iqr = f.q3 - f.q1;
  f.lower = f.q1 - k * iqr;
  f.upper = f.q3 + k * iqr;
  return f;
}

IqrSplit iqr_filter(std::span<const double> values, double k, QuantileMethod method) {
  const Fences f = iqr_fences(values, k, method);
  IqrSplit split;
  for (double v : values) {
    if (v >= f.lower && v <= f.upper) {
      split.kept.push_back(v);
    } else {
      split.removed.push_back(v);
    }
  }
  return split;
}

LinearModel ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidInput("x and y must have the same length");
  }
  if (x.size() < 3) {
    throw InvalidInput("regression needs at least 3 points for an F-test");
  }
  const auto n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    throw DegenerateError("independent variable is constant; slope is undefined");
  }

  LinearModel m;
  m.n = x.size();
  m.slope = sxy / sxx;
  m.intercept = mean_y - m.slope * mean_x;

  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - m(x[i]);
    sse += r * r;
  }
  const double ssr = m.slope * sxy;
  // Residuals below this scale are rounding noise in an exact fit.
  const double exact_floor = 1e-24 * std::max(syy, 1.0) * n;

  if (syy == 0.0) {
    // Constant response: nothing to explain, slope is exactly zero.
    m.r_squared = 0.0;
    m.f_statistic = 0.0;
    m.p_value = 1.0;
    return m;
  }
  m.r_squared = std::clamp(ssr / syy, 0.0, 1.0);
  if (sse <= exact_floor) {
    m.r_squared = 1.0;
    m.f_statistic = std::numeric_limits<double>::infinity();
    m.p_value = 0.0;
    return m;
  }
  const double df_resid = n - 2.0;
  m.f_statistic = std::max(ssr, 0.0) / (sse / df_resid);
  m.p_value = f_distribution_sf(m.f_statistic, 1.0, df_resid);
  return m;
}

namespace {

// Continued fraction for the incomplete beta, modified Lentz evaluation.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) {
    throw InvalidInput("incomplete beta needs positive shape parameters");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidInput("incomplete beta argument must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast only on this side of the mean.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0 && d2 > 0.0)) {
    throw InvalidInput("F distribution needs positive degrees of freedom");
  }
  if (std::isinf(f)) return 0.0;
  if (!(f > 0.0)) return 1.0;
  return regularized_incomplete_beta(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0);
}

RuPrediction predict_ru(double ppl, const LinearModel& use, const LinearModel& edit,
                        const LinearModel& ignore) {
  if (!(ppl >= 1.0) || !std::isfinite(ppl)) {
    throw InvalidInput("perplexity must be finite and >= 1", "ppl");
  }
  RuPrediction r;
  r.raw_use = use(ppl);
  r.raw_edit = edit(ppl);
  r.raw_ignore = ignore(ppl);
  r.raw_sum = r.raw_use + r.raw_edit + r.raw_ignore;

  const double u = std::clamp(r.raw_use, 0.0, 100.0);
  const double e = std::clamp(r.raw_edit, 0.0, 100.0);
  const double i = std::clamp(r.raw_ignore, 0.0, 100.0);
  const double total = u + e + i;
  if (!(total > 0.0)) {
    throw DegenerateError("all three predicted rates clamp to zero at ppl " +
                          std::to_string(ppl));
  }
  r.p_use = u / total;
  r.p_edit = e / total;
  r.p_ignore = i / total;
  return r;
}

}  // namespace encs
