#pragma once

#include <cstdint>

// Expected net cost savings (ENCS) of suggested responses.
//
// Money is USD as double throughout; seconds for time, USD/hour for labor
// rates. Rounding happens only when a report is rendered.

namespace encs {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kDefaultSimplexTolerance = 0.02;

struct AgentEconomics {
  double hourly_rate = 0.0;             // R, USD/hour
  double baseline_response_time = 0.0;  // T_r, seconds per message without assistance

  bool operator==(const AgentEconomics&) const = default;
};

// Time an agent spends on a message for each action taken on the suggestion.
struct ActionTimings {
  double t_use = 0.0;
  double t_edit = 0.0;
  double t_ignore = 0.0;

  bool operator==(const ActionTimings&) const = default;
};

// USD saved per message for each action, R * (T_r - T_x) / 3600.
struct ActionSavings {
  double s_use = 0.0;
  double s_edit = 0.0;
  double s_ignore = 0.0;

  bool operator==(const ActionSavings&) const = default;
};

struct UsageDistribution {
  double p_use = 0.0;
  double p_edit = 0.0;
  double p_ignore = 0.0;

  double sum() const { return p_use + p_edit + p_ignore; }

  bool operator==(const UsageDistribution&) const = default;
};

enum class Normalization {
  kRenormalize,  // scale a within-tolerance distribution to sum exactly to 1
  kAsGiven,      // validate against the tolerance but use the values unchanged
};

struct SimplexPolicy {
  double tolerance = kDefaultSimplexTolerance;
  Normalization normalization = Normalization::kRenormalize;

  bool operator==(const SimplexPolicy&) const = default;
};

struct EncsBreakdown {
  double use = 0.0;
  double edit = 0.0;
  double ignore = 0.0;
};

struct EncsResult {
  double per_message = 0.0;
  double gross_savings = 0.0;
  double generation_cost = 0.0;
  EncsBreakdown breakdown;
};

struct SimulationResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

void validate(const AgentEconomics& econ);
void validate(const ActionTimings& timings);

// Checks each probability lies in [0,1] and the sum is within policy.tolerance
// of 1; returns the distribution to compute with under policy.normalization.
// Throws SimplexViolation otherwise.
UsageDistribution checked_usage(const UsageDistribution& usage, const SimplexPolicy& policy = {});

ActionSavings per_action_savings(const AgentEconomics& econ, const ActionTimings& timings);

EncsResult encs(const UsageDistribution& usage, const ActionSavings& savings, double cost,
                const SimplexPolicy& policy = {});

// Single-outcome form: only accepted suggestions save time.
double encs_simple(double p_use, double s_use, double cost);

double annualize(double per_message, double annual_volume);

// Sum over actions of p_x * t_x, in seconds.
double average_assisted_time(const UsageDistribution& usage, const ActionTimings& timings,
                             const SimplexPolicy& policy = {});

// Draws n actions i.i.d. from usage and averages (S_x - cost). Deterministic
// for a given seed; the generator is local to the call.
SimulationResult simulate_encs(const UsageDistribution& usage, const ActionSavings& savings,
                               double cost, std::uint64_t n, std::uint64_t seed,
                               const SimplexPolicy& policy = {});

}  // namespace encs
