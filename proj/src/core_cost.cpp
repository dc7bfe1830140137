#include "encs/core_cost.hpp"

#include <cmath>
#include <random>
#include <string>

#include "encs/error.hpp"

namespace encs {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw SimplexViolation(std::string(name) + " must lie in [0, 1], got " + std::to_string(p),
                           name);
  }
}

// 53 random bits mapped onto [0, 1). Independent of the standard library's
// distribution implementations so sequences match across toolchains.
double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kSimplexViolation: return "simplex_violation";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kNeverBreaksEven: return "never_breaks_even";
    case ErrorCode::kUnknownPreset: return "unknown_preset";
    case ErrorCode::kUnknownFormat: return "unknown_format";
    case ErrorCode::kInvalidJson: return "invalid_json";
  }
  return "invalid_input";
}

void validate(const AgentEconomics& econ) {
  if (!(econ.hourly_rate > 0.0) || !std::isfinite(econ.hourly_rate)) {
    throw InvalidInput("hourly_rate must be positive", "hourly_rate");
  }
  if (!(econ.baseline_response_time > 0.0) || !std::isfinite(econ.baseline_response_time)) {
    throw InvalidInput("baseline_response_time must be positive", "baseline_response_time");
  }
}

void validate(const ActionTimings& timings) {
  const auto check = [](double t, const char* name) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw InvalidInput(std::string(name) + " must be a non-negative number of seconds", name);
    }
  };
  check(timings.t_use, "t_use");
  check(timings.t_edit, "t_edit");
  check(timings.t_ignore, "t_ignore");
}

UsageDistribution checked_usage(const UsageDistribution& usage, const SimplexPolicy& policy) {
  require_probability(usage.p_use, "p_use");
  require_probability(usage.p_edit, "p_edit");
  require_probability(usage.p_ignore, "p_ignore");
  if (!(policy.tolerance >= 0.0)) {
    throw InvalidInput("simplex tolerance must be non-negative", "simplex_tolerance");
  }
  const double total = usage.sum();
  if (std::abs(total - 1.0) > policy.tolerance) {
    throw SimplexViolation("usage probabilities sum to " + std::to_string(total) +
                           ", outside tolerance " + std::to_string(policy.tolerance));
  }
  if (policy.normalization == Normalization::kAsGiven || total == 1.0) {
    return usage;
  }
  return {usage.p_use / total, usage.p_edit / total, usage.p_ignore / total};
}

ActionSavings per_action_savings(const AgentEconomics& econ, const ActionTimings& timings) {
  validate(econ);
  validate(timings);
  const auto saving = [&](double t_x) {
    return econ.hourly_rate * (econ.baseline_response_time - t_x) / kSecondsPerHour;
  };
  return {saving(timings.t_use), saving(timings.t_edit), saving(timings.t_ignore)};
}

EncsResult encs(const UsageDistribution& usage, const ActionSavings& savings, double cost,
                const SimplexPolicy& policy) {
  const UsageDistribution p = checked_usage(usage, policy);
  EncsResult result;
  result.breakdown = {p.p_use * savings.s_use, p.p_edit * savings.s_edit,
                      p.p_ignore * savings.s_ignore};
  result.gross_savings = result.breakdown.use + result.breakdown.edit + result.breakdown.ignore;
  result.generation_cost = cost;
  result.per_message = result.gross_savings - cost;
  return result;
}

double encs_simple(double p_use, double s_use, double cost) {
  require_probability(p_use, "p_use");
  return p_use * s_use - cost;
}

double annualize(double per_message, double annual_volume) {
  if (!(annual_volume >= 0.0)) {
    throw InvalidInput("annual volume must be non-negative", "annual_messages");
  }
  return per_message * annual_volume;
}

double average_assisted_time(const UsageDistribution& usage, const ActionTimings& timings,
                             const SimplexPolicy& policy) {
  validate(timings);
  const UsageDistribution p = checked_usage(usage, policy);
  return p.p_use * timings.t_use + p.p_edit * timings.t_edit + p.p_ignore * timings.t_ignore;
}

SimulationResult simulate_encs(const UsageDistribution& usage, const ActionSavings& savings,
                               double cost, std::uint64_t n, std::uint64_t seed,
                               const SimplexPolicy& policy) {
  if (n == 0) {
    throw InvalidInput("simulation needs at least one draw", "n");
  }
  const UsageDistribution p = checked_usage(usage, policy);
  // Cumulative thresholds over the (possibly unnormalized) total mass.
  const double total = p.sum();
  const double use_edge = p.p_use / total;
  const double edit_edge = (p.p_use + p.p_edit) / total;

  std::mt19937_64 gen(seed);
  // Welford running mean and sum of squared deviations.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const double u = unit_uniform(gen);
    double value;
    if (u < use_edge) {
      value = savings.s_use;
    } else if (u < edit_edge) {
      value = savings.s_edit;
    } else {
      value = savings.s_ignore;
    }
    value -= cost;
    const double delta = value - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (value - mean);
  }
  SimulationResult result;
  result.n = n;
  result.mean = mean;
  if (n > 1) {
    const double variance = m2 / static_cast<double>(n - 1);
    result.std_error = std::sqrt(variance / static_cast<double>(n));
  }
  return result;
}

}  // namespace encs
