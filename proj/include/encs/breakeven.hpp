#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "encs/core_cost.hpp"

// R&D amortization, break-even volume and the assisted-vs-unassisted labor view.

namespace encs {

struct RndCost {
  double build_cost = 0.0;             // C_R&D, USD
  int amortization_months = 1;
  double annual_maintenance = 0.0;     // USD per year
  std::optional<double> per_message_maintenance;  // C_m; derived from volume when absent

  bool operator==(const RndCost&) const = default;
};

struct BreakEvenCount {
  double exact = 0.0;    // messages, unrounded
  double ceiling = 0.0;  // whole messages needed
};

struct BreakEvenResult {
  double messages = 0.0;
  double messages_ceiling = 0.0;
  double months = 0.0;
};

struct LaborComparison {
  double labor_without = 0.0;  // USD/message, unassisted
  double labor_with = 0.0;     // USD/message, assisted labor only
  double total_with = 0.0;     // labor_with + recommendation cost
  double saving = 0.0;         // labor_without - total_with
  double saving_pct = 0.0;     // saving / labor_without, percent
  double time_with = 0.0;      // seconds
  double time_saving_pct = 0.0;
};

void validate(const RndCost& rnd);

// Throws NeverBreaksEven when encs_per_message <= c_m.
BreakEvenCount messages_to_break_even(double c_rnd, double encs_per_message, double c_m);

double time_to_break_even(double messages, double monthly_volume);

double amortized_build_per_month(double build_cost, int amortization_months);

double monthly_maintenance(const RndCost& rnd);

// Amortized build plus maintenance, per month.
double monthly_rnd_cost(const RndCost& rnd);

// Explicit C_m when given, else monthly maintenance spread over the monthly volume.
double per_message_maintenance(const RndCost& rnd, double messages_per_month);

LaborComparison assisted_labor_comparison(const AgentEconomics& econ,
                                          const UsageDistribution& usage,
                                          const ActionTimings& timings,
                                          double rec_cost_per_message,
                                          const SimplexPolicy& policy = {});

// Cumulative spend vs. cumulative labor offset along the message axis.
struct BreakEvenCurvePoint {
  double messages = 0.0;
  double spend = 0.0;                 // C_R&D + messages * (C + C_m)
  double spend_no_maintenance = 0.0;  // C_R&D + messages * C
  double labor_offset = 0.0;          // messages * gross savings
};

struct BreakEvenCurve {
  std::vector<BreakEvenCurvePoint> points;
  std::optional<double> crossing;  // messages where spend == labor_offset
};

BreakEvenCurve break_even_curve(double c_rnd, double gross_savings, double generation_cost,
                                double c_m, double max_messages, std::size_t samples);

}  // namespace encs
