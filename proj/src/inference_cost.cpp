#include "encs/inference_cost.hpp"

#include <cmath>

#include "encs/core_cost.hpp"
#include "encs/error.hpp"

namespace encs {

void validate(const GpuPricing& pricing) {
  if (!(pricing.monthly_cost > 0.0)) {
    throw InvalidInput("GPU monthly cost must be positive", "monthly_cost");
  }
  if (!(pricing.billed_hours_per_month > 0.0)) {
    throw InvalidInput("billed hours per month must be positive", "billed_hours_per_month");
  }
}

void validate(const ServingProfile& profile) {
  validate(profile.gpu);
  if (!(profile.latency_per_inference >= 0.0) || !std::isfinite(profile.latency_per_inference)) {
    throw InvalidInput("latency must be a non-negative number of seconds",
                       "latency_per_inference");
  }
  if (!(profile.throughput >= 0.0)) {
    throw InvalidInput("throughput must be non-negative", "throughput");
  }
}

void validate(const MessageShape& shape) {
  if (!(shape.chars_per_token > 0.0)) {
    throw InvalidInput("chars_per_token must be positive", "chars_per_token");
  }
  if (!(shape.avg_chars_per_message >= 0.0)) {
    throw InvalidInput("avg_chars_per_message must be non-negative", "avg_chars_per_message");
  }
  if (shape.tokens_per_message) {
    const double explicit_tokens = *shape.tokens_per_message;
    if (!(explicit_tokens >= 0.0)) {
      throw InvalidInput("tokens_per_message must be non-negative", "tokens_per_message");
    }
    if (shape.avg_chars_per_message > 0.0) {
      const double derived = shape.avg_chars_per_message / shape.chars_per_token;
      if (std::abs(explicit_tokens - derived) > 0.01 * derived) {
        throw InvalidInput("tokens_per_message disagrees with avg_chars_per_message / "
                           "chars_per_token by more than 1%",
                           "tokens_per_message");
      }
    }
  }
}

double gpu_hourly_rate(const GpuPricing& pricing) {
  validate(pricing);
  return pricing.monthly_cost / pricing.billed_hours_per_month;
}

double self_hosted_cost_per_inference(const ServingProfile& profile) {
  validate(profile);
  return gpu_hourly_rate(profile.gpu) / kSecondsPerHour * profile.latency_per_inference;
}

double tokens_per_message(const MessageShape& shape) {
  validate(shape);
  if (shape.tokens_per_message) return *shape.tokens_per_message;
  return shape.avg_chars_per_message / shape.chars_per_token;
}

double api_cost_per_message(const ApiPricing& pricing, double tokens) {
  if (!(pricing.usd_per_1k_tokens >= 0.0)) {
    throw InvalidInput("token price must be non-negative", "usd_per_1k_tokens");
  }
  if (!(tokens >= 0.0)) {
    throw InvalidInput("token count must be non-negative", "tokens");
  }
  return pricing.usd_per_1k_tokens * tokens / 1000.0;
}

double cost_per_message_with_overheads(double monthly_usage, double monthly_overhead,
                                       double messages_per_month) {
  if (!(messages_per_month > 0.0)) {
    throw InvalidInput("messages_per_month must be positive", "messages_per_month");
  }
  return (monthly_usage + monthly_overhead) / messages_per_month;
}

}  // namespace encs
