#include "encs/service.hpp"

#include <cmath>

#include "encs/error.hpp"
#include "encs/json_codec.hpp"
#include "httplib.h"

namespace encs::service {

namespace {

using json::Json;

HttpResponse error_response(int status, std::string_view code, const std::string& message,
                            const std::string& field_path = {}) {
  Json err = {{"code", code}, {"message", message}};
  err["field_path"] = field_path.empty() ? Json(nullptr) : Json(field_path);
  return {status, Json{{"error", std::move(err)}}.dump()};
}

const Json& field(const Json& body, const char* key) {
  if (!body.is_object()) throw InvalidInput("request body must be a JSON object", "$");
  if (!body.contains(key)) throw InvalidInput("missing required field", key);
  return body.at(key);
}

double number_field(const Json& body, const char* key) {
  const Json& v = field(body, key);
  if (!v.is_number()) throw InvalidInput("expected a number", key);
  return v.get<double>();
}

// Each of these accepts either an inline object or the name of a preset.
AgentEconomics economics_of(const Json& v, const PresetStore& presets) {
  if (v.is_string()) return presets.economics(v.get<std::string>());
  return json::decode_economics(v, "economics");
}

ActionTimings timings_of(const Json& v, const PresetStore& presets) {
  if (v.is_string()) return presets.timings(v.get<std::string>());
  return json::decode_timings(v, "timings");
}

UsageDistribution usage_of(const Json& v, const PresetStore& presets) {
  if (v.is_string()) return presets.usage(v.get<std::string>());
  return json::decode_usage(v, "usage");
}

RuCoefficients coefficients_of(const Json& v, const PresetStore& presets) {
  if (v.is_string()) return presets.coefficients(v.get<std::string>());
  return json::decode_coefficients(v, "coefficients");
}

Json with_version(Json j, const PresetStore& presets) {
  j["preset_version"] = presets.version();
  return j;
}

Json post_encs(const Json& body, const PresetStore& presets) {
  const AgentEconomics econ = economics_of(field(body, "economics"), presets);
  const ActionTimings timings = timings_of(field(body, "timings"), presets);
  const UsageDistribution usage = usage_of(field(body, "usage"), presets);
  const Json& cost_field = field(body, "cost");
  const double cost = cost_field.is_string() ? presets.per_message_cost(cost_field.get<std::string>())
                                             : number_field(body, "cost");
  SimplexPolicy policy;
  if (body.contains("simplex")) policy = json::decode_simplex(body.at("simplex"), "simplex");

  const ActionSavings savings = per_action_savings(econ, timings);
  Json out = json::encode(encs(usage, savings, cost, policy));
  out["savings"] = json::encode(savings);
  out["average_assisted_time"] = average_assisted_time(usage, timings, policy);
  return with_version(std::move(out), presets);
}

Json post_predict_ru(const Json& body, const PresetStore& presets) {
  const double ppl = number_field(body, "ppl");
  const RuCoefficients c = coefficients_of(field(body, "coefficients"), presets);
  return with_version(json::encode(predict_ru(ppl, c)), presets);
}

Json post_breakeven(const Json& body, const PresetStore& presets) {
  const BreakEvenCount count = messages_to_break_even(
      number_field(body, "c_rnd"), number_field(body, "encs"), number_field(body, "c_m"));
  const BreakEvenResult result{count.exact, count.ceiling,
                               time_to_break_even(count.exact,
                                                  number_field(body, "monthly_volume"))};
  return with_version(json::encode(result), presets);
}

double number_or(const Json& body, const char* key, double fallback) {
  return body.is_object() && body.contains(key) ? number_field(body, key) : fallback;
}

Json post_breakeven_curve(const Json& body, const PresetStore& presets) {
  const double samples = number_or(body, "samples", 101.0);
  if (!(samples >= 2.0) || samples != std::floor(samples) || samples > 100'000.0) {
    throw InvalidInput("samples must be an integer in [2, 100000]", "samples");
  }
  const BreakEvenCurve curve = break_even_curve(
      number_field(body, "c_rnd"), number_field(body, "gross_savings"),
      number_field(body, "generation_cost"), number_or(body, "c_m", 0.0),
      number_field(body, "max_messages"), static_cast<std::size_t>(samples));
  Json out = json::encode(curve);
  if (body.contains("monthly_volume")) {
    const double volume = number_field(body, "monthly_volume");
    for (auto& p : out["points"]) {
      p["months"] = time_to_break_even(p["messages"].get<double>(), volume);
    }
    out["crossing_months"] =
        curve.crossing ? Json(time_to_break_even(*curve.crossing, volume)) : Json(nullptr);
  }
  return with_version(std::move(out), presets);
}

Json post_fit(const Json& body, const PresetStore& presets) {
  const Json& obs = field(body, "observations");
  if (!obs.is_array()) throw InvalidInput("expected an array", "observations");
  std::vector<FitObservation> observations;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    observations.push_back(
        json::decode_observation(obs[i], "observations[" + std::to_string(i) + "]"));
  }
  FitOptions options;
  if (body.contains("options")) options = json::decode_fit_options(body.at("options"), "options");
  return with_version(json::encode(fit_usability(observations, options)), presets);
}

Json post_evaluate(const Json& body, const PresetStore& presets) {
  return json::encode(evaluate_scenario(json::decode_scenario(body), presets));
}

Json get_presets(const PresetStore& presets) {
  Json list = Json::array();
  for (const auto& p : presets.list()) {
    list.push_back({{"kind", p.kind}, {"name", p.name}, {"note", p.note}});
  }
  Json scenarios = Json::object();
  for (const auto& p : presets.list()) {
    if (p.kind == "scenario") scenarios[p.name] = json::encode(presets.scenario(p.name));
  }
  Json out = Json::object();
  out["preset_version"] = presets.version();
  out["presets"] = std::move(list);
  out["data"] = json::parse(presets.main_json());
  out["scenarios"] = std::move(scenarios);
  return out;
}

}  // namespace

HttpResponse Api::handle(std::string_view method, std::string_view path,
                         std::string_view body) const {
  try {
    if (path == "/api/v1/presets") {
      if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
      return {200, get_presets(presets_).dump()};
    }
    using Handler = Json (*)(const Json&, const PresetStore&);
    Handler handler = nullptr;
    if (path == "/api/v1/encs") handler = post_encs;
    if (path == "/api/v1/predict-ru") handler = post_predict_ru;
    if (path == "/api/v1/breakeven") handler = post_breakeven;
    if (path == "/api/v1/breakeven/curve") handler = post_breakeven_curve;
    if (path == "/api/v1/fit") handler = post_fit;
    if (path == "/api/v1/scenario/evaluate") handler = post_evaluate;
    if (!handler) return error_response(404, "not_found", "no such endpoint: " + std::string(path));
    if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
    return {200, handler(json::parse(body), presets_).dump()};
  } catch (const NeverBreaksEven& e) {
    return error_response(422, to_string(e.code()), e.what());
  } catch (const Error& e) {
    return error_response(400, to_string(e.code()), e.what(), e.field_path());
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "invalid_input", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

struct Server::Impl {
  Impl(const Api& a, ServerOptions o) : api(a), options(std::move(o)) {}

  const Api& api;
  ServerOptions options;
  httplib::Server http;
  int port = -1;
};

Server::Server(const Api& api, ServerOptions options)
    : impl_(std::make_unique<Impl>(api, std::move(options))) {
  auto& http = impl_->http;
  const std::string origin = impl_->options.cors_origin;
  http.set_default_headers({{"Access-Control-Allow-Origin", origin},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = impl_->api.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  http.Get(R"(/api/v1/.*)", dispatch);
  http.Post(R"(/api/v1/.*)", dispatch);
  http.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

Server::~Server() = default;

int Server::bind() {
  if (impl_->options.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(impl_->options.bind);
  } else if (impl_->http.bind_to_port(impl_->options.bind, impl_->options.port)) {
    impl_->port = impl_->options.port;
  }
  if (impl_->port < 0) {
    throw InvalidInput("cannot bind " + impl_->options.bind + ":" +
                       std::to_string(impl_->options.port));
  }
  return impl_->port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace encs::service
