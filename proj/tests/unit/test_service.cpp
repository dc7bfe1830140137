#include "doctest.h"

#include <chrono>
#include <random>
#include <thread>

#include "encs/json_codec.hpp"
#include "encs/service.hpp"
#include "httplib.h"

using namespace encs;
using encs::json::Json;

namespace {

Json call(const service::Api& api, const char* method, const char* path, const Json& body,
          int expected_status) {
  const service::HttpResponse r = api.handle(method, path, body.dump());
  CHECK(r.status == expected_status);
  return Json::parse(r.body);
}

}  // namespace

TEST_CASE("POST /api/v1/encs with inline values and preset names") {
  const service::Api api(builtin_presets());
  const Json inline_body = {
      {"economics", {{"hourly_rate", 10.0}, {"baseline_response_time", 30.0}}},
      {"timings", {{"t_use", 5.0}, {"t_edit", 10.0}, {"t_ignore", 35.0}}},
      {"usage", {{"p_use", 0.69}, {"p_edit", 0.14}, {"p_ignore", 0.17}}},
      {"cost", 0.0109}};
  const Json a = call(api, "POST", "/api/v1/encs", inline_body, 200);
  CHECK(a["per_message"].get<double>() * 100.0 == doctest::Approx(4.24).epsilon(0.003));
  CHECK(a["preset_version"] == builtin_presets().version());
  CHECK(a.contains("savings"));

  const Json named = {{"economics", "ar_case_study"},
                      {"timings", "ar_case_study"},
                      {"usage", "annotated/gpt3-pe"},
                      {"cost", "case_study/gpt3-base"}};
  const Json b = call(api, "POST", "/api/v1/encs", named, 200);
  CHECK(b["per_message"].get<double>() == doctest::Approx(a["per_message"].get<double>()));
}

TEST_CASE("error bodies carry code and field path") {
  const service::Api api(builtin_presets());
  Json body = {{"economics", {{"hourly_rate", -1.0}, {"baseline_response_time", 30.0}}},
               {"timings", "ar_case_study"},
               {"usage", "annotated/human"},
               {"cost", 0.0}};
  Json e = call(api, "POST", "/api/v1/encs", body, 400);
  CHECK(e["error"]["code"] == "invalid_input");
  CHECK(e["error"]["field_path"] == "hourly_rate");

  body["economics"] = "ar_case_study";
  body["usage"] = {{"p_use", 0.9}, {"p_edit", 0.9}, {"p_ignore", 0.1}};
  e = call(api, "POST", "/api/v1/encs", body, 400);
  CHECK(e["error"]["code"] == "simplex_violation");

  body["usage"] = "annotated/martian";
  e = call(api, "POST", "/api/v1/encs", body, 400);
  CHECK(e["error"]["code"] == "unknown_preset");

  const service::HttpResponse bad = api.handle("POST", "/api/v1/encs", "{nope");
  CHECK(bad.status == 400);
  CHECK(Json::parse(bad.body)["error"]["code"] == "invalid_json");

  CHECK(api.handle("GET", "/api/v1/nowhere", "").status == 404);
  CHECK(api.handle("GET", "/api/v1/encs", "").status == 405);
  CHECK(api.handle("POST", "/api/v1/presets", "").status == 405);
}

TEST_CASE("POST /api/v1/breakeven") {
  const service::Api api(builtin_presets());
  const Json ok = call(api, "POST", "/api/v1/breakeven",
                       {{"c_rnd", 1000.0}, {"encs", 0.05}, {"c_m", 0.0}, {"monthly_volume", 1e4}},
                       200);
  CHECK(ok["messages"].get<double>() == doctest::Approx(20000.0));
  CHECK(ok["months"].get<double>() == doctest::Approx(2.0));

  const Json never = call(api, "POST", "/api/v1/breakeven",
                          {{"c_rnd", 1000.0}, {"encs", 0.01}, {"c_m", 0.02}, {"monthly_volume", 1e4}},
                          422);
  CHECK(never["error"]["code"] == "never_breaks_even");
}

TEST_CASE("POST /api/v1/predict-ru") {
  const service::Api api(builtin_presets());
  const Json r = call(api, "POST", "/api/v1/predict-ru",
                      {{"ppl", 4.27}, {"coefficients", "ppl_two_point"}}, 200);
  CHECK(r["p_use"].get<double>() * 100.0 == doctest::Approx(62.4).epsilon(0.002));
  const Json low = call(api, "POST", "/api/v1/predict-ru",
                        {{"ppl", 0.5}, {"coefficients", "ppl_two_point"}}, 400);
  CHECK(low["error"]["code"] == "invalid_input");
}

TEST_CASE("POST /api/v1/scenario/evaluate and GET /api/v1/presets") {
  const service::Api api(builtin_presets());
  const Json scenario = json::encode(builtin_presets().scenario("appendix_k"));
  const Json report = call(api, "POST", "/api/v1/scenario/evaluate", scenario, 200);
  REQUIRE(report["rows"].size() == 2);
  CHECK(report["rows"][0]["break_even_status"] == "breaks_even");
  CHECK(report["scenario_echo"] == scenario);

  const service::HttpResponse p = api.handle("GET", "/api/v1/presets", "");
  CHECK(p.status == 200);
  const Json presets = Json::parse(p.body);
  CHECK(presets["scenarios"].contains("ar_table4"));
  CHECK(presets["data"].contains("usage"));
  CHECK_FALSE(presets["presets"].empty());
}

TEST_CASE("POST /api/v1/breakeven/curve") {
  const service::Api api(builtin_presets());
  const Json c = call(api, "POST", "/api/v1/breakeven/curve",
                      {{"c_rnd", 1000.0},
                       {"gross_savings", 0.08},
                       {"generation_cost", 0.02},
                       {"c_m", 0.01},
                       {"max_messages", 100000.0},
                       {"samples", 11},
                       {"monthly_volume", 10000.0}},
                      200);
  REQUIRE(c["points"].size() == 11);
  CHECK(c["points"][10]["months"].get<double>() == doctest::Approx(10.0));
  const BreakEvenCurve lib = break_even_curve(1000.0, 0.08, 0.02, 0.01, 100000.0, 11);
  CHECK(c["crossing"].get<double>() == *lib.crossing);
  for (std::size_t i = 0; i < lib.points.size(); ++i) {
    CHECK(c["points"][i]["spend"].get<double>() == lib.points[i].spend);
    CHECK(c["points"][i]["labor_offset"].get<double>() == lib.points[i].labor_offset);
  }

  const Json never = call(api, "POST", "/api/v1/breakeven/curve",
                          {{"c_rnd", 1000.0},
                           {"gross_savings", 0.01},
                           {"generation_cost", 0.02},
                           {"max_messages", 1000.0}},
                          200);
  CHECK(never["crossing"].is_null());
  CHECK(never["points"].size() == 101);

  const Json bad = call(api, "POST", "/api/v1/breakeven/curve",
                        {{"c_rnd", 1.0},
                         {"gross_savings", 0.01},
                         {"generation_cost", 0.0},
                         {"max_messages", 10.0},
                         {"samples", 1.5}},
                        400);
  CHECK(bad["error"]["field_path"] == "samples");
}

TEST_CASE("POST /api/v1/fit") {
  const service::Api api(builtin_presets());
  Json obs = Json::array();
  for (int i = 0; i < 20; ++i) {
    const double ppl = 2.0 + 0.25 * i;
    const double use = 66.6 - ppl;
    obs.push_back({{"model_id", i % 2 ? "a" : "b"},
                   {"ppl", ppl},
                   {"use_pct", use},
                   {"edit_pct", 15.0},
                   {"ignore_pct", 100.0 - use - 15.0}});
  }
  const Json r = call(api, "POST", "/api/v1/fit", {{"observations", obs}}, 200);
  CHECK(r["coefficients"]["use"]["slope"].get<double>() == doctest::Approx(-1.0));
  CHECK(r["observations"] == 20);
  CHECK(r["per_model"].contains("a"));

  const Json bad = call(api, "POST", "/api/v1/fit",
                        {{"observations", obs}, {"options", {{"outliers", "some"}}}}, 400);
  CHECK(bad["error"]["field_path"] == "options.outliers");
  obs[3].erase("ppl");
  const Json missing = call(api, "POST", "/api/v1/fit", {{"observations", obs}}, 400);
  CHECK(missing["error"]["field_path"] == "observations[3].ppl");
}

TEST_CASE("predict-ru with constant coefficients returns the constants") {
  const service::Api api(builtin_presets());
  const Json constant = {{"use", {{"slope", 0.0}, {"intercept", 50.0}}},
                         {"edit", {{"slope", 0.0}, {"intercept", 25.0}}},
                         {"ignore", {{"slope", 0.0}, {"intercept", 25.0}}}};
  const Json r =
      call(api, "POST", "/api/v1/predict-ru", {{"ppl", 1.0}, {"coefficients", constant}}, 200);
  CHECK(r["p_use"] == 0.5);
  CHECK(r["p_edit"] == 0.25);
  CHECK(r["p_ignore"] == 0.25);
}

TEST_CASE("property: responses are idempotent and equal the library values exactly") {
  const service::Api api(builtin_presets());
  std::mt19937_64 gen(81);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const AgentEconomics econ{1.0 + 50.0 * u(gen), 5.0 + 60.0 * u(gen)};
    const ActionTimings t{60.0 * u(gen), 60.0 * u(gen), 90.0 * u(gen)};
    const double a = u(gen) + 0.01, b = u(gen), c = u(gen);
    const UsageDistribution p{a / (a + b + c), b / (a + b + c), c / (a + b + c)};
    const double cost = 0.05 * u(gen);
    const Json body = {{"economics", json::encode(econ)},
                       {"timings", json::encode(t)},
                       {"usage", json::encode(p)},
                       {"cost", cost}};
    const service::HttpResponse first = api.handle("POST", "/api/v1/encs", body.dump());
    const service::HttpResponse second = api.handle("POST", "/api/v1/encs", body.dump());
    REQUIRE(first.status == 200);
    CHECK(first.body == second.body);
    const EncsResult lib = encs::encs(p, per_action_savings(econ, t), cost);
    const Json got = Json::parse(first.body);
    CHECK(got["per_message"].get<double>() == lib.per_message);
    CHECK(got["gross_savings"].get<double>() == lib.gross_savings);
  }
}

TEST_CASE("HTTP server answers over a real socket") {
  const service::Api api(builtin_presets());
  service::ServerOptions options;
  options.port = 0;
  options.cors_origin = "http://localhost:5173";
  service::Server server(api, options);
  const int port = server.bind();
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(std::chrono::seconds(5));
  httplib::Result res;
  for (int attempt = 0; attempt < 50 && !res; ++attempt) {
    res = client.Get("/api/v1/presets");
    if (!res) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");

  const auto post = client.Post("/api/v1/breakeven",
                                R"({"c_rnd": 10, "encs": 0.01, "c_m": 0.02, "monthly_volume": 5})",
                                "application/json");
  REQUIRE(post);
  CHECK(post->status == 422);

  const auto options_res = client.Options("/api/v1/encs");
  REQUIRE(options_res);
  CHECK(options_res->status == 204);

  server.stop();
  t.join();
}
