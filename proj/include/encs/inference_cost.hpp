#pragma once

#include <optional>
#include <string>

// Per-message generation cost for self-hosted GPU serving and third-party APIs.
// Storage unit is USD; cents are a display unit only.

namespace encs {

inline constexpr double kDefaultCharsPerToken = 4.0;

struct GpuPricing {
  std::string name;
  double monthly_cost = 0.0;            // USD per month
  double billed_hours_per_month = 0.0;  // hours billed at that monthly cost

  bool operator==(const GpuPricing&) const = default;
};

struct ServingProfile {
  std::string model;
  double latency_per_inference = 0.0;  // seconds
  double throughput = 0.0;             // inferences/second, capacity reporting only
  GpuPricing gpu;

  bool operator==(const ServingProfile&) const = default;
};

struct ApiPricing {
  double usd_per_1k_tokens = 0.0;
  std::string note;

  bool operator==(const ApiPricing&) const = default;
};

struct MessageShape {
  double avg_chars_per_message = 0.0;
  double chars_per_token = kDefaultCharsPerToken;
  std::optional<double> tokens_per_message;  // explicit count overrides the char-derived one

  bool operator==(const MessageShape&) const = default;
};

void validate(const GpuPricing& pricing);
void validate(const ServingProfile& profile);
void validate(const MessageShape& shape);

double gpu_hourly_rate(const GpuPricing& pricing);

// Serial occupancy: the GPU is billed for the latency of one inference.
double self_hosted_cost_per_inference(const ServingProfile& profile);

double tokens_per_message(const MessageShape& shape);

double api_cost_per_message(const ApiPricing& pricing, double tokens);

double cost_per_message_with_overheads(double monthly_usage, double monthly_overhead,
                                       double messages_per_month);

}  // namespace encs
