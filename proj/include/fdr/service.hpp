#pragma once

// Stateless reward service. The HTTP server and the stdio pipe share one
// request handler, so both transports speak identical JSON.
//
//   POST /v1/reward      {"items": [{"id", "prediction", "ground_truth"}], "config_profile"?}
//                        -> [{"id", "text"?, "formula"?, "table"?, "composite"} | {"id", "error"}]
//   POST /v1/advantages  {"groups": [[r, ...], ...], "config_profile"?} -> [[a, ...], ...]
//   GET  /v1/health      -> {"status": "ok", "version", "profiles"}
//
// Failures answer {"error": {"code", "reason"}} with status 400 (request
// schema) or 404 (unknown profile). Pipe requests may carry "op" ("reward",
// "advantages", "health"); without it the op is inferred from the keys.

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "fdr/config.hpp"
#include "fdr/doc_model.hpp"

namespace fdr {

struct ServiceResponse {
  int status = 200;
  ordered_json body;
};

ServiceResponse handle_reward(const ConfigRegistry& registry, const ordered_json& request, unsigned workers = 1);
ServiceResponse handle_advantages(const ConfigRegistry& registry, const ordered_json& request);
ServiceResponse handle_health(const ConfigRegistry& registry);

// Dispatches on "op" or on the request keys.
ServiceResponse handle_request(const ConfigRegistry& registry, const ordered_json& request, unsigned workers = 1);

// Parses one line and answers it; malformed JSON yields an error body.
std::string handle_line(const ConfigRegistry& registry, std::string_view line, unsigned workers = 1);

// One response line per non-blank request line, until EOF.
void serve_pipe(std::istream& in, std::ostream& out, const ConfigRegistry& registry, unsigned workers = 1);

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port", ":port" or "port". Throws Error{Config}.
BindAddress parse_bind(std::string_view text);

// Name of the environment variable that overrides the bind address.
inline constexpr const char* kBindEnvVar = "FDR_BIND";

class HttpServer {
 public:
  HttpServer(ConfigRegistry registry, unsigned workers);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port; throws Error{Io}.
  int bind(const BindAddress& addr);
  // Blocks until stop().
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Binds (honoring FDR_BIND) and serves until the process is stopped.
void serve_http(std::string_view bind, const ConfigRegistry& registry, unsigned workers);

}  // namespace fdr
