#include "encs/data_io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "encs/error.hpp"
#include "encs/json_codec.hpp"

namespace encs {

namespace {

class Table {
 public:
  Table(std::string_view text, std::vector<std::string> required, std::string what)
      : rows_(parse_csv(text)), what_(std::move(what)) {
    if (rows_.empty()) throw InvalidInput(what_ + " file is empty");
    for (std::size_t i = 0; i < rows_[0].size(); ++i) columns_[rows_[0][i]] = i;
    for (const auto& name : required) {
      if (!columns_.count(name)) {
        throw InvalidInput(what_ + " file lacks column '" + name + "'", name);
      }
    }
  }

  std::size_t size() const { return rows_.size() - 1; }

  bool has_column(const std::string& name) const { return columns_.count(name) > 0; }

  const std::string& get(std::size_t row, const std::string& column) const {
    const CsvRow& r = rows_[row + 1];
    const std::size_t idx = columns_.at(column);
    if (idx >= r.size()) {
      throw InvalidInput(what_ + " line " + std::to_string(row + 2) + " has too few fields",
                         column);
    }
    return r[idx];
  }

  double number(std::size_t row, const std::string& column) const {
    const std::string& s = get(row, column);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw InvalidInput(what_ + " line " + std::to_string(row + 2) + ": '" + s +
                             "' is not a number",
                         column);
    }
  }

  int integer(std::size_t row, const std::string& column) const {
    const double v = number(row, column);
    if (v != static_cast<int>(v)) {
      throw InvalidInput(what_ + " line " + std::to_string(row + 2) + ": expected an integer",
                         column);
    }
    return static_cast<int>(v);
  }

  bool boolean(std::size_t row, const std::string& column) const {
    std::string s = get(row, column);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw InvalidInput(what_ + " line " + std::to_string(row + 2) + ": '" + s +
                           "' is not a boolean",
                       column);
  }

 private:
  std::vector<CsvRow> rows_;
  std::map<std::string, std::size_t> columns_;
  std::string what_;
};

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_has_content || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      row_has_content = false;
    } else {
      field += c;
      row_has_content = true;
    }
  }
  if (quoted) throw InvalidInput("unterminated quoted CSV field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<AnnotationRecord> parse_annotations(std::string_view csv_text) {
  const Table t(csv_text, {"conversation_id", "model_id", "annotator_id", "label"}, "annotation");
  const bool has_length = t.has_column("token_length");
  std::vector<AnnotationRecord> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    AnnotationRecord r;
    r.conversation_id = t.get(i, "conversation_id");
    r.model_id = t.get(i, "model_id");
    r.annotator_id = t.get(i, "annotator_id");
    r.label = parse_label(t.get(i, "label"));
    if (has_length && !t.get(i, "token_length").empty()) {
      r.response_token_length = t.number(i, "token_length");
    }
    out.push_back(std::move(r));
  }
  validate_unique(out);
  return out;
}

std::vector<MetricRecord> parse_metrics(std::string_view csv_text) {
  std::vector<std::string> required = {"conversation_id", "model_id"};
  for (auto name : kMetricNames) required.emplace_back(name);
  const Table t(csv_text, required, "metric");
  std::vector<MetricRecord> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    MetricRecord r;
    r.conversation_id = t.get(i, "conversation_id");
    r.model_id = t.get(i, "model_id");
    r.sensible = t.boolean(i, "sensible");
    r.specific = t.boolean(i, "specific");
    r.informative = t.boolean(i, "informative");
    r.helpful = t.boolean(i, "helpful");
    r.safe = t.boolean(i, "safe");
    r.role_consistent = t.boolean(i, "role_consistent");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ConversationMeta> parse_conversation_meta(std::string_view csv_text) {
  const Table t(csv_text,
                {"conversation_id", "agent_turns", "human_agent_messages", "bot_messages",
                 "quality_score"},
                "conversation");
  std::vector<ConversationMeta> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ConversationMeta m;
    m.conversation_id = t.get(i, "conversation_id");
    m.agent_turns = t.integer(i, "agent_turns");
    m.human_agent_messages = t.integer(i, "human_agent_messages");
    m.bot_messages = t.integer(i, "bot_messages");
    m.quality_score = t.number(i, "quality_score");
    if (m.agent_turns < 0 || m.human_agent_messages < 0 || m.bot_messages < 0) {
      throw InvalidInput("conversation line " + std::to_string(i + 2) +
                         ": counts must be non-negative");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<PerplexitySample> parse_logprobs(std::string_view jsonl_text) {
  std::vector<PerplexitySample> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl_text.size()) {
    const std::size_t end = std::min(jsonl_text.find('\n', pos), jsonl_text.size());
    const std::string_view line = jsonl_text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    const json::Json j = json::parse(line);
    if (!j.is_object() || !j.contains("model_id") || !j.contains("conversation_id")) {
      throw InvalidInput(where + ": record needs model_id and conversation_id");
    }
    PerplexitySample s;
    try {
      s.model_id = j.at("model_id").get<std::string>();
      s.conversation_id = j.at("conversation_id").get<std::string>();
      const bool missing = j.value("missing", false);
      if (!missing) {
        if (j.contains("probs")) {
          s.ppl = perplexity(j.at("probs").get<std::vector<double>>());
        } else if (j.contains("logprobs")) {
          s.ppl = perplexity_from_logprobs(j.at("logprobs").get<std::vector<double>>());
        } else {
          throw InvalidInput(where + ": record needs probs, logprobs or missing=true");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(where + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace encs
