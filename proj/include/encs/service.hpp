#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "encs/presets.hpp"

// Stateless JSON API over the library operations. Request handling is
// independent of the transport so it can be exercised without sockets.
//
//   POST /api/v1/encs              economics, timings, usage, cost -> EncsResult
//   POST /api/v1/predict-ru        ppl, coefficients               -> RuPrediction
//   POST /api/v1/breakeven         c_rnd, encs, c_m, monthly_volume -> BreakEvenResult
//   POST /api/v1/breakeven/curve   c_rnd, gross_savings, generation_cost, c_m,
//                                  max_messages, samples, monthly_volume -> curve points
//   POST /api/v1/fit               observations, options           -> FitResult
//   POST /api/v1/scenario/evaluate Scenario                        -> Report
//   GET  /api/v1/presets                                           -> preset catalogue
//
// Errors are {"error": {"code", "message", "field_path"}} with status 400,
// or 422 for never_breaks_even.

namespace encs::service {

struct HttpResponse {
  int status = 200;
  std::string body;
};

class Api {
 public:
  explicit Api(const PresetStore& presets) : presets_(presets) {}

  HttpResponse handle(std::string_view method, std::string_view path,
                      std::string_view body) const;

 private:
  const PresetStore& presets_;
};

struct ServerOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

// Wraps cpp-httplib. listen() blocks until stop() is called from another thread.
class Server {
 public:
  Server(const Api& api, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind();
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace encs::service
