#include "encs/annotation_stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

#include "encs/error.hpp"

namespace encs {

namespace {

using ItemKey = std::pair<std::string, std::string>;  // conversation, model

struct Item {
  std::array<int, kRuCategoryCount> counts{};
  double length_sum = 0.0;
  int length_count = 0;
};

std::map<ItemKey, Item> group_items(std::span<const AnnotationRecord> records,
                                    std::optional<std::string_view> model_id) {
  std::map<ItemKey, Item> items;
  for (const auto& r : records) {
    if (model_id && r.model_id != *model_id) continue;
    Item& item = items[{r.conversation_id, r.model_id}];
    ++item.counts[static_cast<std::size_t>(to_category(r.label))];
    if (r.response_token_length) {
      item.length_sum += *r.response_token_length;
      ++item.length_count;
    }
  }
  return items;
}

// Index of the unique most frequent category, or nullopt on a tie.
std::optional<std::size_t> unique_mode(const std::array<int, kRuCategoryCount>& counts) {
  const auto max_it = std::max_element(counts.begin(), counts.end());
  if (std::count(counts.begin(), counts.end(), *max_it) != 1) return std::nullopt;
  return static_cast<std::size_t>(max_it - counts.begin());
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

RuCategory to_category(RuLabel label) {
  switch (label) {
    case RuLabel::kUse: return RuCategory::kUse;
    case RuLabel::kEdit: return RuCategory::kEdit;
    case RuLabel::kIgnore:
    case RuLabel::kNoSuggestion: return RuCategory::kIgnore;
  }
  return RuCategory::kIgnore;
}

std::string_view to_string(RuCategory category) {
  switch (category) {
    case RuCategory::kUse: return "use";
    case RuCategory::kEdit: return "edit";
    case RuCategory::kIgnore: return "ignore";
  }
  return "ignore";
}

RuLabel parse_label(std::string_view text) {
  const std::string s = lowercase(text);
  if (s == "use") return RuLabel::kUse;
  if (s == "edit") return RuLabel::kEdit;
  if (s == "ignore") return RuLabel::kIgnore;
  if (s == "no_suggestion") return RuLabel::kNoSuggestion;
  throw InvalidInput("unknown label '" + std::string(text) +
                         "' (expected use, edit, ignore or no_suggestion)",
                     "label");
}

bool metric_value(const MetricRecord& record, std::size_t metric_index) {
  switch (metric_index) {
    case 0: return record.sensible;
    case 1: return record.specific;
    case 2: return record.informative;
    case 3: return record.helpful;
    case 4: return record.safe;
    case 5: return record.role_consistent;
    default: throw InvalidInput("metric index out of range");
  }
}

void validate_unique(std::span<const AnnotationRecord> records) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.conversation_id, r.model_id, r.annotator_id).second) {
      throw InvalidInput("duplicate annotation for conversation '" + r.conversation_id +
                         "', model '" + r.model_id + "', annotator '" + r.annotator_id + "'");
    }
  }
}

UsageDistribution label_distribution(std::span<const AnnotationRecord> records,
                                     std::string_view model_id) {
  std::array<std::size_t, kRuCategoryCount> counts{};
  std::size_t total = 0;
  for (const auto& r : records) {
    if (r.model_id != model_id) continue;
    ++counts[static_cast<std::size_t>(to_category(r.label))];
    ++total;
  }
  if (total == 0) {
    throw InvalidInput("no annotations for model '" + std::string(model_id) + "'", "model_id");
  }
  const auto n = static_cast<double>(total);
  return {static_cast<double>(counts[0]) / n, static_cast<double>(counts[1]) / n,
          static_cast<double>(counts[2]) / n};
}

AgreementTable agreement_table(std::span<const AnnotationRecord> records,
                               std::optional<std::string_view> model_id) {
  AgreementTable table;
  for (const auto& [key, item] : group_items(records, model_id)) {
    const int raters = std::accumulate(item.counts.begin(), item.counts.end(), 0);
    if (table.counts.empty()) {
      table.raters_per_item = raters;
    } else if (raters != table.raters_per_item) {
      throw InvalidInput("item (" + key.first + ", " + key.second + ") has " +
                         std::to_string(raters) + " raters, expected " +
                         std::to_string(table.raters_per_item));
    }
    table.counts.push_back(item.counts);
  }
  return table;
}

double fleiss_kappa(const AgreementTable& table) {
  const std::size_t items = table.counts.size();
  const int raters = table.raters_per_item;
  if (items < 2) {
    throw InvalidInput("Fleiss kappa needs at least 2 items");
  }
  if (raters < 2) {
    throw InvalidInput("Fleiss kappa needs at least 2 raters per item");
  }
  std::array<double, kRuCategoryCount> category_totals{};
  double agreement_sum = 0.0;
  for (const auto& row : table.counts) {
    int row_total = 0;
    double squares = 0.0;
    for (std::size_t j = 0; j < kRuCategoryCount; ++j) {
      if (row[j] < 0) throw InvalidInput("negative category count");
      row_total += row[j];
      squares += static_cast<double>(row[j]) * row[j];
      category_totals[j] += row[j];
    }
    if (row_total != raters) {
      throw InvalidInput("every item must be rated by exactly " + std::to_string(raters) +
                         " raters");
    }
    agreement_sum += (squares - raters) / (static_cast<double>(raters) * (raters - 1));
  }
  const double mean_agreement = agreement_sum / static_cast<double>(items);
  const double total_ratings = static_cast<double>(items) * raters;
  double chance = 0.0;
  for (double t : category_totals) {
    const double p = t / total_ratings;
    chance += p * p;
  }
  if (chance == 1.0) {
    // Every rating falls in one category, so every item is unanimous.
    return 1.0;
  }
  return (mean_agreement - chance) / (1.0 - chance);
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidInput("pearson_r needs equal-length series");
  }
  if (x.size() < 2) {
    throw InvalidInput("pearson_r needs at least 2 points");
  }
  const auto n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateError("pearson_r is undefined for a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix ru_metric_correlation(std::span<const AnnotationRecord> annotations,
                                        std::span<const MetricRecord> metrics,
                                        CorrelationEncoding encoding) {
  std::map<ItemKey, const MetricRecord*> by_item;
  for (const auto& m : metrics) {
    by_item[{m.conversation_id, m.model_id}] = &m;
  }

  // Paired rows: category index of the judgment and the metric record.
  std::vector<std::pair<std::size_t, const MetricRecord*>> rows;
  if (encoding == CorrelationEncoding::kPerJudgment) {
    for (const auto& a : annotations) {
      const auto it = by_item.find({a.conversation_id, a.model_id});
      if (it == by_item.end()) continue;
      rows.emplace_back(static_cast<std::size_t>(to_category(a.label)), it->second);
    }
  } else {
    for (const auto& [key, item] : group_items(annotations, std::nullopt)) {
      const auto it = by_item.find(key);
      if (it == by_item.end()) continue;
      if (const auto mode = unique_mode(item.counts)) rows.emplace_back(*mode, it->second);
    }
  }
  if (rows.size() < 2) {
    throw InvalidInput("fewer than 2 annotation rows have matching metric records");
  }

  CorrelationMatrix result{};
  std::vector<double> indicator(rows.size());
  std::vector<double> metric(rows.size());
  for (std::size_t c = 0; c < kRuCategoryCount; ++c) {
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        indicator[i] = rows[i].first == c ? 1.0 : 0.0;
        metric[i] = metric_value(*rows[i].second, m) ? 1.0 : 0.0;
      }
      try {
        result[c][m] = pearson_r(indicator, metric);
      } catch (const DegenerateError&) {
        result[c][m] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return result;
}

std::map<RuCategory, double> length_by_agreement(std::span<const AnnotationRecord> records,
                                                 int min_matching) {
  if (min_matching < 1) {
    throw InvalidInput("min_matching must be at least 1", "min_matching");
  }
  std::array<double, kRuCategoryCount> sums{};
  std::array<int, kRuCategoryCount> counts{};
  for (const auto& [key, item] : group_items(records, std::nullopt)) {
    const auto mode = unique_mode(item.counts);
    if (!mode || item.counts[*mode] < min_matching) continue;
    if (item.length_count == 0) {
      throw InvalidInput("item (" + key.first + ", " + key.second +
                             ") has no response token length",
                         "token_length");
    }
    sums[*mode] += item.length_sum / item.length_count;
    ++counts[*mode];
  }
  std::map<RuCategory, double> means;
  for (std::size_t c = 0; c < kRuCategoryCount; ++c) {
    if (counts[c] > 0) means[static_cast<RuCategory>(c)] = sums[c] / counts[c];
  }
  return means;
}

}  // namespace encs
