#include "fdr/service.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <set>
#include <thread>

#include <httplib.h>

#include "fdr/reward.hpp"
#include "fdr/rl_math.hpp"
#include "fdr/version.hpp"

namespace fdr {

namespace {

ServiceResponse fail(int status, const char* code, const std::string& reason) {
  ordered_json body = ordered_json::object();
  body["error"] = {{"code", code}, {"reason", reason}};
  return {status, std::move(body)};
}

// Resolves "config_profile"; nullptr with `err` filled on failure.
const Profile* resolve_profile(const ConfigRegistry& registry, const ordered_json& request, ServiceResponse& err) {
  std::string name = "default";
  if (request.contains("config_profile")) {
    const auto& p = request["config_profile"];
    if (!p.is_string()) {
      err = fail(400, "InvalidRequest", "config_profile must be a string");
      return nullptr;
    }
    name = p.get<std::string>();
  }
  if (!registry.contains(name)) {
    err = fail(404, "UnknownProfile", "unknown profile: " + name);
    return nullptr;
  }
  return &registry.get(name);
}

// Error reasons can echo raw request bytes, so responses never fail on
// invalid UTF-8.
std::string dump_response(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

unsigned worker_count(unsigned workers) { return workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers; }

}  // namespace

ServiceResponse handle_reward(const ConfigRegistry& registry, const ordered_json& request, unsigned workers) {
  if (!request.is_object()) return fail(400, "InvalidRequest", "request must be a JSON object");
  ServiceResponse err;
  const Profile* profile = resolve_profile(registry, request, err);
  if (!profile) return err;
  if (!request.contains("items") || !request["items"].is_array())
    return fail(400, "InvalidRequest", "items must be an array");
  const auto& items = request["items"];
  if (items.empty()) return fail(400, "EmptyItems", "items must be non-empty");

  std::vector<std::string> ids;
  std::vector<RewardPair> pairs;
  ids.reserve(items.size());
  pairs.reserve(items.size());
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const std::string where = "items[" + std::to_string(i) + "]";
    if (!it.is_object()) return fail(400, "InvalidRequest", where + " must be an object");
    for (const char* key : {"id", "prediction", "ground_truth"})
      if (!it.contains(key) || !it[key].is_string())
        return fail(400, "InvalidRequest", where + "." + key + " must be a string");
    ids.push_back(it["id"].get<std::string>());
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!seen.insert(ids[i]).second) return fail(400, "DuplicateId", "duplicate id: " + ids[i]);
    pairs.push_back({items[i]["prediction"].get_ref<const std::string&>(),
                     items[i]["ground_truth"].get_ref<const std::string&>()});
  }

  const auto outcomes = batch_reward(pairs, profile->reward, worker_count(workers));
  ordered_json body = ordered_json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    body.push_back(to_json(RewardRecord{ids[i], outcomes[i].breakdown, outcomes[i].error}));
  return {200, std::move(body)};
}

ServiceResponse handle_advantages(const ConfigRegistry& registry, const ordered_json& request) {
  if (!request.is_object()) return fail(400, "InvalidRequest", "request must be a JSON object");
  ServiceResponse err;
  const Profile* profile = resolve_profile(registry, request, err);
  if (!profile) return err;
  if (!request.contains("groups") || !request["groups"].is_array())
    return fail(400, "InvalidRequest", "groups must be an array of arrays");
  ordered_json body = ordered_json::array();
  const auto& groups = request["groups"];
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string where = "groups[" + std::to_string(g) + "]";
    if (!groups[g].is_array()) return fail(400, "InvalidRequest", where + " must be an array");
    std::vector<double> rewards;
    for (const auto& r : groups[g]) {
      if (!r.is_number()) return fail(400, "InvalidRequest", where + " must hold numbers");
      rewards.push_back(r.get<double>());
    }
    if (rewards.empty()) return fail(400, "EmptyGroup", where + " is empty");
    try {
      body.push_back(group_advantages(rewards, profile->grpo));
    } catch (const Error& e) {
      return fail(400, to_string(e.code()), where + ": " + e.what());
    }
  }
  return {200, std::move(body)};
}

ServiceResponse handle_health(const ConfigRegistry& registry) {
  ordered_json body = ordered_json::object();
  body["status"] = "ok";
  body["version"] = kBuildId;
  body["profiles"] = registry.names();
  return {200, std::move(body)};
}

ServiceResponse handle_request(const ConfigRegistry& registry, const ordered_json& request, unsigned workers) {
  if (!request.is_object()) return fail(400, "InvalidRequest", "request must be a JSON object");
  std::string op;
  if (request.contains("op")) {
    if (!request["op"].is_string()) return fail(400, "InvalidRequest", "op must be a string");
    op = request["op"].get<std::string>();
  } else if (request.contains("items")) {
    op = "reward";
  } else if (request.contains("groups")) {
    op = "advantages";
  } else {
    return fail(400, "InvalidRequest", "cannot infer op: expected items or groups");
  }
  if (op == "reward") return handle_reward(registry, request, workers);
  if (op == "advantages") return handle_advantages(registry, request);
  if (op == "health") return handle_health(registry);
  return fail(400, "InvalidRequest", "unknown op: " + op);
}

std::string handle_line(const ConfigRegistry& registry, std::string_view line, unsigned workers) {
  ordered_json request;
  try {
    request = ordered_json::parse(line);
  } catch (const std::exception& e) {
    return dump_response(fail(400, "MalformedJson", e.what()).body);
  }
  return dump_response(handle_request(registry, request, workers).body);
}

void serve_pipe(std::istream& in, std::ostream& out, const ConfigRegistry& registry, unsigned workers) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle_line(registry, line, workers) << '\n';
    out.flush();
  }
}

BindAddress parse_bind(std::string_view text) {
  BindAddress addr;
  std::string_view port = text;
  if (std::size_t colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) addr.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  }
  int value = -1;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (port.empty() || ec != std::errc() || ptr != port.data() + port.size() || value < 0 || value > 65535)
    throw Error(ErrorCode::Config, "invalid bind address: " + std::string(text));
  addr.port = value;
  return addr;
}

struct HttpServer::Impl {
  ConfigRegistry registry;
  unsigned workers;
  httplib::Server server;

  static void reply(httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(dump_response(r.body), "application/json");
  }

  void post(const char* path, ServiceResponse (*handler)(const Impl&, const ordered_json&)) {
    server.Post(path, [this, handler](const httplib::Request& req, httplib::Response& res) {
      ordered_json body;
      try {
        body = ordered_json::parse(req.body);
      } catch (const std::exception& e) {
        reply(res, fail(400, "MalformedJson", e.what()));
        return;
      }
      try {
        reply(res, handler(*this, body));
      } catch (const std::exception& e) {
        reply(res, fail(400, "InvalidRequest", e.what()));
      }
    });
  }

  Impl(ConfigRegistry reg, unsigned w) : registry(std::move(reg)), workers(worker_count(w)) {
    // Scoring inside a request stays single-threaded; requests themselves
    // run on the pool.
    const unsigned pool = workers;
    server.new_task_queue = [pool] { return new httplib::ThreadPool(pool); };
    server.Get("/v1/health",
               [this](const httplib::Request&, httplib::Response& res) { reply(res, handle_health(registry)); });
    post("/v1/reward", [](const Impl& self, const ordered_json& j) { return handle_reward(self.registry, j, 1); });
    post("/v1/advantages", [](const Impl& self, const ordered_json& j) { return handle_advantages(self.registry, j); });
  }
};

HttpServer::HttpServer(ConfigRegistry registry, unsigned workers)
    : impl_(std::make_unique<Impl>(std::move(registry), workers)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const BindAddress& addr) {
  int port = addr.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(addr.host);
  } else if (!impl_->server.bind_to_port(addr.host, port)) {
    port = -1;
  }
  if (port < 0)
    throw Error(ErrorCode::Io, "cannot bind " + addr.host + ":" + std::to_string(addr.port));
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void serve_http(std::string_view bind, const ConfigRegistry& registry, unsigned workers) {
  std::string address(bind);
  if (const char* env = std::getenv(kBindEnvVar); env && *env) address = env;
  HttpServer server(registry, workers);
  const BindAddress addr = parse_bind(address);
  const int port = server.bind(addr);
  std::cerr << kBuildId << " listening on " << addr.host << ":" << port << "\n";
  server.run();
}

}  // namespace fdr
