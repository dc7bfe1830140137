#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "encs/annotation_stats.hpp"
#include "encs/scenario.hpp"
#include "encs/usability_model.hpp"

// Readers for the tabular and line-delimited input files.

namespace encs {

using CsvRow = std::vector<std::string>;

// RFC 4180 style: comma separated, double-quoted fields, "" escapes a quote.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string read_file(const std::string& path);

// Header: conversation_id,model_id,annotator_id,label,token_length (token_length may be empty).
std::vector<AnnotationRecord> parse_annotations(std::string_view csv_text);

// Header: conversation_id,model_id,sensible,specific,informative,helpful,safe,role_consistent.
std::vector<MetricRecord> parse_metrics(std::string_view csv_text);

// Header: conversation_id,agent_turns,human_agent_messages,bot_messages,quality_score.
std::vector<ConversationMeta> parse_conversation_meta(std::string_view csv_text);

// One JSON object per line: model_id, conversation_id and either probs (token
// probabilities), logprobs (natural-log probabilities) or missing=true.
std::vector<PerplexitySample> parse_logprobs(std::string_view jsonl_text);

}  // namespace encs
