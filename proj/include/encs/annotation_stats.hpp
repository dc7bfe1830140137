#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "encs/core_cost.hpp"

// Aggregation and agreement statistics over use/edit/ignore annotations.

namespace encs {

enum class RuLabel { kUse, kEdit, kIgnore, kNoSuggestion };

// Index into the three-category space; NoSuggestion folds into Ignore.
enum class RuCategory { kUse = 0, kEdit = 1, kIgnore = 2 };

inline constexpr std::size_t kRuCategoryCount = 3;

RuCategory to_category(RuLabel label);
std::string_view to_string(RuCategory category);
// Case-insensitive: use, edit, ignore, no_suggestion.
RuLabel parse_label(std::string_view text);

struct AnnotationRecord {
  std::string conversation_id;
  std::string model_id;
  std::string annotator_id;
  RuLabel label = RuLabel::kIgnore;
  std::optional<double> response_token_length;
};

struct MetricRecord {
  std::string conversation_id;
  std::string model_id;
  bool sensible = false;
  bool specific = false;
  bool informative = false;
  bool helpful = false;
  bool safe = false;
  bool role_consistent = false;
};

inline constexpr std::array<std::string_view, 6> kMetricNames = {
    "sensible", "specific", "informative", "helpful", "safe", "role_consistent"};

bool metric_value(const MetricRecord& record, std::size_t metric_index);

// Rows are items, columns are category counts.
struct AgreementTable {
  std::vector<std::array<int, kRuCategoryCount>> counts;
  int raters_per_item = 0;
};

// Rejects duplicate (conversation, model, annotator) triples.
void validate_unique(std::span<const AnnotationRecord> records);

UsageDistribution label_distribution(std::span<const AnnotationRecord> records,
                                     std::string_view model_id);

// Items are (conversation, model) pairs; restricted to model_id when given.
// Throws InvalidInput when items have differing rater counts.
AgreementTable agreement_table(std::span<const AnnotationRecord> records,
                               std::optional<std::string_view> model_id = std::nullopt);

double fleiss_kappa(const AgreementTable& table);

double pearson_r(std::span<const double> x, std::span<const double> y);

enum class CorrelationEncoding {
  kPerJudgment,     // one row per annotator judgment
  kPerItemMajority  // one row per item, label is the unique modal label
};

// Correlation of each RU category indicator with each binary metric label.
// result[category][metric]; entries are NaN when a series is constant.
using CorrelationMatrix = std::array<std::array<double, kMetricNames.size()>, kRuCategoryCount>;

CorrelationMatrix ru_metric_correlation(std::span<const AnnotationRecord> annotations,
                                        std::span<const MetricRecord> metrics,
                                        CorrelationEncoding encoding =
                                            CorrelationEncoding::kPerJudgment);

// Mean response token length of items whose unique modal label has at least
// min_matching votes, bucketed by that label. Tied modes are excluded.
std::map<RuCategory, double> length_by_agreement(std::span<const AnnotationRecord> records,
                                                 int min_matching);

}  // namespace encs
