// encs-lab: expected net cost savings of suggested responses.
//
//   encs-lab evaluate --preset ar_table4 --format csv
//   encs-lab fit --annotations a.csv --logprobs lp.jsonl
//   encs-lab stats --annotations a.csv --metrics m.csv
//   encs-lab breakeven --preset appendix_k [--plot-data --model in_house]
//   encs-lab simulate --preset ar_table4 --n 1000000 --seed 7
//   encs-lab serve --port 8080
//
// Exit codes: 0 success, 1 invalid input, 2 never-breaks-even with --strict.

#include <cmath>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "encs/annotation_stats.hpp"
#include "encs/data_io.hpp"
#include "encs/error.hpp"
#include "encs/json_codec.hpp"
#include "encs/presets.hpp"
#include "encs/scenario.hpp"
#include "encs/service.hpp"
#include "encs/usability_fit.hpp"

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitNever = 2;

using encs::json::Json;

struct GlobalOptions {
  std::string scenario_path;
  std::string preset;
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::string out;
  bool strict = false;
};

void write_output(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw encs::InvalidInput("cannot write " + g.out, "out");
  f << text;
}

encs::Scenario scenario_from(const GlobalOptions& g) {
  if (!g.scenario_path.empty() && !g.preset.empty()) {
    throw encs::InvalidInput("give either --scenario or --preset, not both");
  }
  if (!g.scenario_path.empty()) return encs::load_scenario(g.scenario_path);
  if (!g.preset.empty()) return encs::builtin_presets().scenario(g.preset);
  throw encs::InvalidInput("a scenario is required (--scenario PATH or --preset NAME)");
}

bool any_never(const encs::Report& report) {
  for (const auto& r : report.rows) {
    if (r.break_even_status == encs::BreakEvenStatus::kNever) return true;
  }
  return false;
}

int cmd_evaluate(const GlobalOptions& g) {
  const encs::Report report = encs::evaluate_scenario(scenario_from(g), encs::builtin_presets());
  write_output(g, encs::emit_report(report, encs::parse_report_format(g.format)));
  return g.strict && any_never(report) ? kExitNever : 0;
}

struct FitArgs {
  std::string annotations;
  std::string logprobs;
  double iqr_k = encs::kTukeyMultiplier;
  std::string quantile = "type7";
  std::string outliers = "pooled";
};

int cmd_fit(const GlobalOptions& g, const FitArgs& a) {
  const auto annotations = encs::parse_annotations(encs::read_file(a.annotations));
  const auto samples = encs::parse_logprobs(encs::read_file(a.logprobs));
  encs::FitOptions options;
  options.iqr_k = a.iqr_k;
  options.quantile =
      a.quantile == "type6" ? encs::QuantileMethod::kType6 : encs::QuantileMethod::kType7;
  if (a.outliers == "per-model") options.outliers = encs::OutlierMode::kPerModel;
  if (a.outliers == "none") options.outliers = encs::OutlierMode::kNone;

  const auto observations = encs::build_observations(annotations, samples);
  const encs::FitResult fit = encs::fit_usability(observations, options);

  if (g.format == "csv") {
    std::string out = "scope,target,slope,intercept,n,r_squared,f_statistic,p_value\n";
    const auto rows = [&](const std::string& scope, const encs::RuCoefficients& c) {
      const std::pair<const char*, const encs::LinearModel*> targets[] = {
          {"use", &c.use}, {"edit", &c.edit}, {"ignore", &c.ignore}};
      for (const auto& [name, m] : targets) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%zu,%.6f,%.6g,%.6g\n", scope.c_str(),
                      name, m->slope, m->intercept, m->n, m->r_squared, m->f_statistic,
                      m->p_value);
        out += buf;
      }
    };
    rows("pooled", fit.pooled);
    for (const auto& [model, c] : fit.per_model) {
      if (c) rows(model, *c);
    }
    write_output(g, out);
    return 0;
  }
  write_output(g, encs::json::encode(fit).dump(2) + "\n");
  return 0;
}

struct StatsArgs {
  std::string annotations;
  std::string metrics;
  std::string encoding = "per-judgment";
  int min_matching = 3;
};

Json kappa_or_null(const std::vector<encs::AnnotationRecord>& records,
                   std::optional<std::string_view> model) {
  try {
    return encs::fleiss_kappa(encs::agreement_table(records, model));
  } catch (const encs::Error& e) {
    return Json{{"error", e.what()}};
  }
}

int cmd_stats(const GlobalOptions& g, const StatsArgs& a) {
  const auto records = encs::parse_annotations(encs::read_file(a.annotations));
  std::vector<std::string> models;
  for (const auto& r : records) {
    if (std::find(models.begin(), models.end(), r.model_id) == models.end()) {
      models.push_back(r.model_id);
    }
  }
  Json out = Json::object();
  Json dist = Json::object();
  Json kappa = Json::object();
  kappa["all_models"] = kappa_or_null(records, std::nullopt);
  for (const auto& m : models) {
    dist[m] = encs::json::encode(encs::label_distribution(records, m));
    kappa[m] = kappa_or_null(records, m);
  }
  out["label_distribution"] = std::move(dist);
  out["fleiss_kappa"] = std::move(kappa);

  Json lengths = Json::object();
  bool has_lengths = std::all_of(records.begin(), records.end(),
                                 [](const auto& r) { return r.response_token_length.has_value(); });
  if (has_lengths) {
    for (const auto& [category, mean] : encs::length_by_agreement(records, a.min_matching)) {
      lengths[std::string(encs::to_string(category))] = mean;
    }
    out["length_by_agreement"] = {{"min_matching", a.min_matching}, {"mean_tokens", lengths}};
  }

  if (!a.metrics.empty()) {
    const auto metrics = encs::parse_metrics(encs::read_file(a.metrics));
    const auto encoding = a.encoding == "majority" ? encs::CorrelationEncoding::kPerItemMajority
                                                   : encs::CorrelationEncoding::kPerJudgment;
    const auto matrix = encs::ru_metric_correlation(records, metrics, encoding);
    Json corr = Json::object();
    for (std::size_t c = 0; c < encs::kRuCategoryCount; ++c) {
      Json row = Json::object();
      for (std::size_t m = 0; m < encs::kMetricNames.size(); ++m) {
        const double v = matrix[c][m];
        row[std::string(encs::kMetricNames[m])] = std::isnan(v) ? Json(nullptr) : Json(v);
      }
      corr[std::string(encs::to_string(static_cast<encs::RuCategory>(c)))] = std::move(row);
    }
    out["pearson"] = {{"encoding", a.encoding}, {"matrix", std::move(corr)}};
  }
  write_output(g, out.dump(2) + "\n");
  return 0;
}

struct BreakevenArgs {
  std::optional<double> c_rnd;
  std::optional<double> encs_value;
  double c_m = 0.0;
  std::optional<double> monthly_volume;
  bool plot_data = false;
  std::string model;
  double max_messages = 0.0;
  std::size_t samples = 101;
};

int cmd_breakeven(const GlobalOptions& g, const BreakevenArgs& a) {
  if (a.c_rnd || a.encs_value) {
    if (!a.c_rnd || !a.encs_value || !a.monthly_volume) {
      throw encs::InvalidInput("explicit mode needs --c-rnd, --encs and --monthly-volume");
    }
    try {
      const auto count = encs::messages_to_break_even(*a.c_rnd, *a.encs_value, a.c_m);
      const double months = encs::time_to_break_even(count.exact, *a.monthly_volume);
      if (g.format == "json") {
        write_output(g, encs::json::encode(encs::BreakEvenResult{count.exact, count.ceiling,
                                                                 months})
                                .dump(2) +
                            "\n");
      } else {
        char buf[128];
        std::snprintf(buf, sizeof buf, "break_even_messages,break_even_months\n%.0f,%.2f\n",
                      count.ceiling, months);
        write_output(g, buf);
      }
      return 0;
    } catch (const encs::NeverBreaksEven&) {
      write_output(g, g.format == "json"
                          ? std::string("{\n  \"break_even\": \"never\"\n}\n")
                          : std::string("break_even_messages,break_even_months\nnever,never\n"));
      return g.strict ? kExitNever : 0;
    }
  }

  const encs::Scenario scenario = scenario_from(g);
  if (!scenario.rnd) throw encs::InvalidInput("scenario has no rnd block", "rnd");
  const encs::Report report = encs::evaluate_scenario(scenario, encs::builtin_presets());
  if (!a.plot_data) {
    write_output(g, encs::emit_report(report, encs::parse_report_format(g.format)));
    return g.strict && any_never(report) ? kExitNever : 0;
  }
  const encs::ReportRow* row = nullptr;
  for (const auto& r : report.rows) {
    if (a.model.empty() || r.model_id == a.model) {
      row = &r;
      break;
    }
  }
  if (!row) throw encs::InvalidInput("no model '" + a.model + "' in scenario", "model");
  double max_messages = a.max_messages;
  if (max_messages <= 0.0) {
    // Twice the crossing, or one month of volume when there is none.
    max_messages = row->break_even ? 2.0 * row->break_even->messages
                                   : scenario.volumes.messages_per_month;
  }
  const auto curve =
      encs::break_even_curve(scenario.rnd->build_cost, row->gross_savings, row->cost_per_message,
                             row->per_message_maintenance, max_messages, a.samples);
  write_output(g, encs::emit_curve_csv(curve));
  return g.strict && !curve.crossing ? kExitNever : 0;
}

int cmd_simulate(const GlobalOptions& g, std::uint64_t n) {
  const encs::Scenario scenario = scenario_from(g);
  const auto& presets = encs::builtin_presets();
  const encs::ActionSavings savings = encs::per_action_savings(scenario.economics, scenario.timings);
  // Sampling draws from a proper distribution, so compare against the renormalized ENCS.
  encs::SimplexPolicy policy = scenario.simplex;
  policy.normalization = encs::Normalization::kRenormalize;
  Json rows = Json::array();
  std::string csv = "model_id,analytic_usd,simulated_usd,std_error_usd,z\n";
  for (const auto& m : scenario.models) {
    const encs::UsageDistribution usage = encs::resolve_usage(m.usage, presets);
    const double cost = encs::resolve_cost(m.cost, scenario, presets);
    const double analytic = encs::encs(usage, savings, cost, policy).per_message;
    const auto sim = encs::simulate_encs(usage, savings, cost, n, g.seed, policy);
    const double z = sim.std_error > 0.0 ? (sim.mean - analytic) / sim.std_error : 0.0;
    rows.push_back({{"model_id", m.model_id},
                    {"analytic", analytic},
                    {"simulated", sim.mean},
                    {"std_error", sim.std_error},
                    {"z", z}});
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.8f,%.8f,%.8f,%.3f\n", m.model_id.c_str(), analytic,
                  sim.mean, sim.std_error, z);
    csv += buf;
  }
  if (g.format == "json") {
    write_output(g, Json{{"n", n}, {"seed", g.seed}, {"rows", rows}}.dump(2) + "\n");
  } else {
    write_output(g, csv);
  }
  return 0;
}

struct FilterArgs {
  std::string conversations;
  int min_agent_turns = 2;
  double quality_threshold = 0.0;
  bool inclusive_quality = false;
};

int cmd_filter(const GlobalOptions& g, const FilterArgs& a) {
  const auto metas = encs::parse_conversation_meta(encs::read_file(a.conversations));
  encs::FilterConfig config;
  config.min_agent_turns = a.min_agent_turns;
  config.quality_threshold = a.quality_threshold;
  config.strict_quality = !a.inclusive_quality;
  const auto outcome = encs::dataset_filter(metas, config);
  if (g.format == "json") {
    Json kept = Json::array();
    for (const auto& m : outcome.kept) kept.push_back(m.conversation_id);
    Json rejected = Json::array();
    for (const auto& [m, reason] : outcome.rejected) {
      rejected.push_back({{"conversation_id", m.conversation_id}, {"reason", encs::to_string(reason)}});
    }
    write_output(g, Json{{"kept", kept}, {"rejected", rejected}}.dump(2) + "\n");
    return 0;
  }
  std::string out = "conversation_id,status,reason\n";
  for (const auto& m : outcome.kept) out += m.conversation_id + ",kept,\n";
  for (const auto& [m, reason] : outcome.rejected) {
    out += m.conversation_id + ",rejected," + std::string(encs::to_string(reason)) + "\n";
  }
  write_output(g, out);
  return 0;
}

encs::service::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& bind, int port, const std::string& cors) {
  const encs::service::Api api(encs::builtin_presets());
  encs::service::Server server(api, {bind, port, cors});
  const int bound = server.bind();
  std::cerr << "encs-lab serving on http://" << bind << ":" << bound << "/api/v1 (presets "
            << encs::builtin_presets().version() << ")\n";
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected net cost savings of LLM response suggestions"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--scenario", g.scenario_path, "Scenario JSON file");
  app.add_option("--preset", g.preset, "Built-in scenario preset (ar_table4, appendix_k)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Random seed for simulate");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_flag("--strict", g.strict, "Exit with status 2 if any model never breaks even");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a scenario into a per-model report");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit perplexity -> usage regressions");
  fit->add_option("--annotations", fit_args.annotations, "Annotation CSV")->required();
  fit->add_option("--logprobs", fit_args.logprobs, "Token probability JSONL")->required();
  fit->add_option("--iqr-k", fit_args.iqr_k, "IQR fence multiplier");
  fit->add_option("--quantile", fit_args.quantile, "Quartile estimator")
      ->check(CLI::IsMember({"type7", "type6"}));
  fit->add_option("--outliers", fit_args.outliers, "Outlier fences")
      ->check(CLI::IsMember({"pooled", "per-model", "none"}));

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Annotation distributions and agreement");
  stats->add_option("--annotations", stats_args.annotations, "Annotation CSV")->required();
  stats->add_option("--metrics", stats_args.metrics, "Foundation metric CSV");
  stats->add_option("--encoding", stats_args.encoding, "Correlation encoding")
      ->check(CLI::IsMember({"per-judgment", "majority"}));
  stats->add_option("--min-matching", stats_args.min_matching, "Votes needed for agreement");

  BreakevenArgs be;
  auto* breakeven = app.add_subcommand("breakeven", "Break-even analysis");
  breakeven->add_option("--c-rnd", be.c_rnd, "Up-front R&D cost, USD");
  breakeven->add_option("--encs", be.encs_value, "ENCS per message, USD");
  breakeven->add_option("--c-m", be.c_m, "Maintenance per message, USD");
  breakeven->add_option("--monthly-volume", be.monthly_volume, "Messages per month");
  breakeven->add_flag("--plot-data", be.plot_data, "Emit cumulative spend/offset series");
  breakeven->add_option("--model", be.model, "Model for --plot-data");
  breakeven->add_option("--max-messages", be.max_messages, "Right edge of the series");
  breakeven->add_option("--samples", be.samples, "Points in the series");

  std::uint64_t n = 1'000'000;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of analytic ENCS");
  simulate->add_option("--n", n, "Draws per model");

  FilterArgs filter_args;
  auto* filter = app.add_subcommand("filter", "Apply the conversation selection filter");
  filter->add_option("--conversations", filter_args.conversations, "Conversation CSV")
      ->required();
  filter->add_option("--min-agent-turns", filter_args.min_agent_turns);
  filter->add_option("--quality-threshold", filter_args.quality_threshold);
  filter->add_flag("--inclusive-quality", filter_args.inclusive_quality,
                   "Keep scores equal to the threshold");

  std::string bind = "127.0.0.1";
  int port = 8080;
  if (const char* env = std::getenv("ENCS_LAB_PORT")) port = std::atoi(env);
  std::string cors = "*";
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--port", port, "Port (default $ENCS_LAB_PORT or 8080)");
  serve->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*evaluate) return cmd_evaluate(g);
    if (*fit) return cmd_fit(g, fit_args);
    if (*stats) return cmd_stats(g, stats_args);
    if (*breakeven) return cmd_breakeven(g, be);
    if (*simulate) return cmd_simulate(g, n);
    if (*filter) return cmd_filter(g, filter_args);
    if (*serve) return cmd_serve(bind, port, cors);
  } catch (const encs::Error& e) {
    std::cerr << "error [" << encs::to_string(e.code()) << "]";
    if (!e.field_path().empty()) std::cerr << " at " << e.field_path();
    std::cerr << ": " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
