#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "encs/annotation_stats.hpp"
#include "encs/breakeven.hpp"
#include "encs/core_cost.hpp"
#include "encs/error.hpp"
#include "encs/inference_cost.hpp"
#include "encs/presets.hpp"
#include "encs/scenario.hpp"
#include "encs/service.hpp"
#include "encs/usability_model.hpp"

namespace py = pybind11;

namespace {

encs::SimplexPolicy policy_of(double tolerance, const std::string& normalization) {
  encs::SimplexPolicy p;
  p.tolerance = tolerance;
  if (normalization == "renormalize") {
    p.normalization = encs::Normalization::kRenormalize;
  } else if (normalization == "as_given") {
    p.normalization = encs::Normalization::kAsGiven;
  } else {
    throw encs::InvalidInput("normalization must be renormalize or as_given", "normalization");
  }
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Expected net cost savings for LLM-assisted customer service.";

  // Kept alive by the module for the interpreter's lifetime.
  static const py::handle error =
      py::exception<encs::Error>(m, "EncsError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const encs::Error& e) {
      py::object exc = error(e.what());
      exc.attr("code") = std::string(encs::to_string(e.code()));
      exc.attr("field_path") = e.field_path();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<encs::AgentEconomics>(m, "AgentEconomics")
      .def(py::init<double, double>(), py::arg("hourly_rate"), py::arg("baseline_response_time"))
      .def_readwrite("hourly_rate", &encs::AgentEconomics::hourly_rate)
      .def_readwrite("baseline_response_time", &encs::AgentEconomics::baseline_response_time);

  py::class_<encs::ActionTimings>(m, "ActionTimings")
      .def(py::init<double, double, double>(), py::arg("t_use"), py::arg("t_edit"),
           py::arg("t_ignore"))
      .def_readwrite("t_use", &encs::ActionTimings::t_use)
      .def_readwrite("t_edit", &encs::ActionTimings::t_edit)
      .def_readwrite("t_ignore", &encs::ActionTimings::t_ignore);

  py::class_<encs::UsageDistribution>(m, "UsageDistribution")
      .def(py::init<double, double, double>(), py::arg("p_use"), py::arg("p_edit"),
           py::arg("p_ignore"))
      .def_readwrite("p_use", &encs::UsageDistribution::p_use)
      .def_readwrite("p_edit", &encs::UsageDistribution::p_edit)
      .def_readwrite("p_ignore", &encs::UsageDistribution::p_ignore)
      .def("__repr__", [](const encs::UsageDistribution& u) {
        return "UsageDistribution(" + std::to_string(u.p_use) + ", " + std::to_string(u.p_edit) +
               ", " + std::to_string(u.p_ignore) + ")";
      });

  py::class_<encs::ActionSavings>(m, "ActionSavings")
      .def_readonly("s_use", &encs::ActionSavings::s_use)
      .def_readonly("s_edit", &encs::ActionSavings::s_edit)
      .def_readonly("s_ignore", &encs::ActionSavings::s_ignore);

  py::class_<encs::EncsResult>(m, "EncsResult")
      .def_readonly("per_message", &encs::EncsResult::per_message)
      .def_readonly("gross_savings", &encs::EncsResult::gross_savings)
      .def_readonly("generation_cost", &encs::EncsResult::generation_cost);

  py::class_<encs::SimulationResult>(m, "SimulationResult")
      .def_readonly("mean", &encs::SimulationResult::mean)
      .def_readonly("std_error", &encs::SimulationResult::std_error)
      .def_readonly("n", &encs::SimulationResult::n);

  m.def("per_action_savings", &encs::per_action_savings, py::arg("economics"),
        py::arg("timings"));
  m.def(
      "encs",
      [](const encs::UsageDistribution& u, const encs::ActionSavings& s, double cost,
         double tolerance, const std::string& normalization) {
        return encs::encs(u, s, cost, policy_of(tolerance, normalization));
      },
      py::arg("usage"), py::arg("savings"), py::arg("cost"),
      py::arg("tolerance") = encs::kDefaultSimplexTolerance,
      py::arg("normalization") = "renormalize");
  m.def("encs_simple", &encs::encs_simple, py::arg("p_use"), py::arg("s_use"), py::arg("cost"));
  m.def("annualize", &encs::annualize, py::arg("per_message"), py::arg("annual_volume"));
  m.def(
      "average_assisted_time",
      [](const encs::UsageDistribution& u, const encs::ActionTimings& t) {
        return encs::average_assisted_time(u, t);
      },
      py::arg("usage"), py::arg("timings"));
  m.def(
      "simulate_encs",
      [](const encs::UsageDistribution& u, const encs::ActionSavings& s, double cost,
         std::uint64_t n, std::uint64_t seed) { return encs::simulate_encs(u, s, cost, n, seed); },
      py::arg("usage"), py::arg("savings"), py::arg("cost"), py::arg("n"), py::arg("seed"));

  m.def(
      "gpu_hourly_rate",
      [](double monthly_cost, double hours) {
        return encs::gpu_hourly_rate({"", monthly_cost, hours});
      },
      py::arg("monthly_cost"), py::arg("billed_hours_per_month"));
  m.def(
      "self_hosted_cost_per_inference",
      [](double latency, double monthly_cost, double hours) {
        return encs::self_hosted_cost_per_inference({"", latency, 0.0, {"", monthly_cost, hours}});
      },
      py::arg("latency_seconds"), py::arg("monthly_cost"), py::arg("billed_hours_per_month"));

  m.def(
      "perplexity", [](const std::vector<double>& p) { return encs::perplexity(p); },
      py::arg("token_probs"));
  m.def(
      "perplexity_from_logprobs",
      [](const std::vector<double>& lp) { return encs::perplexity_from_logprobs(lp); },
      py::arg("logprobs"));
  m.def(
      "iqr_filter",
      [](const std::vector<double>& v, double k) {
        const encs::IqrSplit s = encs::iqr_filter(v, k);
        return py::make_tuple(s.kept, s.removed);
      },
      py::arg("values"), py::arg("k") = encs::kTukeyMultiplier);

  py::class_<encs::LinearModel>(m, "LinearModel")
      .def(py::init([](double slope, double intercept) {
             encs::LinearModel l;
             l.slope = slope;
             l.intercept = intercept;
             return l;
           }),
           py::arg("slope"), py::arg("intercept"))
      .def_readonly("slope", &encs::LinearModel::slope)
      .def_readonly("intercept", &encs::LinearModel::intercept)
      .def_readonly("n", &encs::LinearModel::n)
      .def_readonly("r_squared", &encs::LinearModel::r_squared)
      .def_readonly("f_statistic", &encs::LinearModel::f_statistic)
      .def_readonly("p_value", &encs::LinearModel::p_value)
      .def("__call__", &encs::LinearModel::operator());

  py::class_<encs::RuPrediction>(m, "RuPrediction")
      .def_readonly("p_use", &encs::RuPrediction::p_use)
      .def_readonly("p_edit", &encs::RuPrediction::p_edit)
      .def_readonly("p_ignore", &encs::RuPrediction::p_ignore)
      .def_readonly("raw_sum", &encs::RuPrediction::raw_sum);

  m.def(
      "ols_fit",
      [](const std::vector<double>& x, const std::vector<double>& y) { return encs::ols_fit(x, y); },
      py::arg("x"), py::arg("y"));
  m.def(
      "predict_ru",
      [](double ppl, const encs::LinearModel& use, const encs::LinearModel& edit,
         const encs::LinearModel& ignore) { return encs::predict_ru(ppl, use, edit, ignore); },
      py::arg("ppl"), py::arg("use"), py::arg("edit"), py::arg("ignore"));
  m.def(
      "predict_ru_preset",
      [](double ppl, const std::string& name) {
        return encs::predict_ru(ppl, encs::builtin_presets().coefficients(name));
      },
      py::arg("ppl"), py::arg("coefficients") = "ppl_two_point");

  m.def(
      "fleiss_kappa",
      [](const std::vector<std::array<int, 3>>& counts) {
        encs::AgreementTable t;
        t.counts = counts;
        t.raters_per_item = counts.empty() ? 0 : counts[0][0] + counts[0][1] + counts[0][2];
        for (const auto& row : counts) {
          if (row[0] + row[1] + row[2] != t.raters_per_item) {
            throw encs::InvalidInput("every item needs the same number of raters", "counts");
          }
        }
        return encs::fleiss_kappa(t);
      },
      py::arg("counts"));
  m.def(
      "pearson_r",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return encs::pearson_r(x, y);
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "messages_to_break_even",
      [](double c_rnd, double encs_per_message, double c_m) {
        const encs::BreakEvenCount c = encs::messages_to_break_even(c_rnd, encs_per_message, c_m);
        return py::make_tuple(c.exact, c.ceiling);
      },
      py::arg("c_rnd"), py::arg("encs_per_message"), py::arg("c_m") = 0.0);
  m.def("time_to_break_even", &encs::time_to_break_even, py::arg("messages"),
        py::arg("monthly_volume"));

  m.def("preset_version", [] { return encs::builtin_presets().version(); });
  m.def("list_presets", [] {
    py::list out;
    for (const auto& p : encs::builtin_presets().list()) {
      out.append(py::dict(py::arg("kind") = p.kind, py::arg("name") = p.name,
                          py::arg("note") = p.note));
    }
    return out;
  });
  m.def(
      "scenario_json",
      [](const std::string& name) {
        return encs::emit_scenario(encs::builtin_presets().scenario(name));
      },
      py::arg("name"));
  m.def(
      "evaluate_scenario",
      [](const std::string& scenario_json, const std::string& format) {
        const encs::Scenario s = encs::parse_scenario(scenario_json);
        return encs::emit_report(encs::evaluate_scenario(s, encs::builtin_presets()),
                                 encs::parse_report_format(format));
      },
      py::arg("scenario_json"), py::arg("format") = "json");
  m.def(
      "evaluate_preset",
      [](const std::string& name, const std::string& format) {
        return encs::emit_report(
            encs::evaluate_scenario(encs::builtin_presets().scenario(name), encs::builtin_presets()),
            encs::parse_report_format(format));
      },
      py::arg("name"), py::arg("format") = "json");
  m.def(
      "handle_request",
      [](const std::string& method, const std::string& path, const std::string& body) {
        static const encs::service::Api api(encs::builtin_presets());
        const encs::service::HttpResponse r = api.handle(method, path, body);
        return py::make_tuple(r.status, r.body);
      },
      py::arg("method"), py::arg("path"), py::arg("body") = "");
}
