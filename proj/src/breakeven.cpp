#include "encs/breakeven.hpp"

#include <cmath>

#include "encs/error.hpp"

namespace encs {

void validate(const RndCost& rnd) {
  if (!(rnd.build_cost >= 0.0)) throw InvalidInput("build_cost must be non-negative", "build_cost");
  if (rnd.amortization_months < 1) {
    throw InvalidInput("amortization_months must be at least 1", "amortization_months");
  }
  if (!(rnd.annual_maintenance >= 0.0)) {
    throw InvalidInput("annual_maintenance must be non-negative", "annual_maintenance");
  }
  if (rnd.per_message_maintenance && !(*rnd.per_message_maintenance >= 0.0)) {
    throw InvalidInput("per_message_maintenance must be non-negative", "per_message_maintenance");
  }
}

BreakEvenCount messages_to_break_even(double c_rnd, double encs_per_message, double c_m) {
  if (!(c_rnd >= 0.0)) throw InvalidInput("R&D cost must be non-negative", "c_rnd");
  if (!std::isfinite(encs_per_message) || !std::isfinite(c_m)) {
    throw InvalidInput("ENCS and maintenance cost must be finite");
  }
  const double margin = encs_per_message - c_m;
  if (!(margin > 0.0)) {
    throw NeverBreaksEven("ENCS per message does not exceed per-message maintenance cost");
  }
  BreakEvenCount count;
  count.exact = c_rnd / margin;
  count.ceiling = std::ceil(count.exact);
  return count;
}

double time_to_break_even(double messages, double monthly_volume) {
  if (!(monthly_volume > 0.0)) {
    throw InvalidInput("monthly volume must be positive", "monthly_volume");
  }
  if (!(messages >= 0.0)) throw InvalidInput("message count must be non-negative", "messages");
  return messages / monthly_volume;
}

double amortized_build_per_month(double build_cost, int amortization_months) {
  if (amortization_months < 1) {
    throw InvalidInput("amortization_months must be at least 1", "amortization_months");
  }
  return build_cost / amortization_months;
}

double monthly_maintenance(const RndCost& rnd) { return rnd.annual_maintenance / 12.0; }

double monthly_rnd_cost(const RndCost& rnd) {
  validate(rnd);
  return amortized_build_per_month(rnd.build_cost, rnd.amortization_months) +
         monthly_maintenance(rnd);
}

double per_message_maintenance(const RndCost& rnd, double messages_per_month) {
  validate(rnd);
  if (rnd.per_message_maintenance) return *rnd.per_message_maintenance;
  if (!(messages_per_month > 0.0)) {
    throw InvalidInput("messages_per_month must be positive to derive C_m", "messages_per_month");
  }
  return monthly_maintenance(rnd) / messages_per_month;
}

LaborComparison assisted_labor_comparison(const AgentEconomics& econ,
                                          const UsageDistribution& usage,
                                          const ActionTimings& timings,
                                          double rec_cost_per_message,
                                          const SimplexPolicy& policy) {
  validate(econ);
  LaborComparison c;
  c.time_with = average_assisted_time(usage, timings, policy);
  c.labor_without = econ.hourly_rate * econ.baseline_response_time / kSecondsPerHour;
  c.labor_with = econ.hourly_rate * c.time_with / kSecondsPerHour;
  c.total_with = c.labor_with + rec_cost_per_message;
  c.saving = c.labor_without - c.total_with;
  c.saving_pct = 100.0 * c.saving / c.labor_without;
  c.time_saving_pct =
      100.0 * (econ.baseline_response_time - c.time_with) / econ.baseline_response_time;
  return c;
}

BreakEvenCurve break_even_curve(double c_rnd, double gross_savings, double generation_cost,
                                double c_m, double max_messages, std::size_t samples) {
  if (samples < 2) throw InvalidInput("a curve needs at least 2 samples", "samples");
  if (!(max_messages > 0.0)) throw InvalidInput("max_messages must be positive", "max_messages");
  BreakEvenCurve curve;
  curve.points.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = max_messages * static_cast<double>(i) / static_cast<double>(samples - 1);
    curve.points.push_back({x, c_rnd + x * (generation_cost + c_m), c_rnd + x * generation_cost,
                            x * gross_savings});
  }
  const double margin = gross_savings - generation_cost - c_m;
  if (margin > 0.0) curve.crossing = c_rnd / margin;
  return curve;
}

}  // namespace encs
