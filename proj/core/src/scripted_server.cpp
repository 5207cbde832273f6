#include "critloop/scripted_server.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "critloop/errors.hpp"
#include "critloop/hashing.hpp"
#include "critloop/rng.hpp"

namespace critloop {
namespace {

using nlohmann::json;

std::string fixture_key(Role role, std::string_view fp, int index) {
  std::string key{to_string(role)};
  key.push_back('\x1f');
  key.append(fp);
  key.push_back('\x1f');
  key.append(std::to_string(index));
  return key;
}

}  // namespace

void FixtureStore::add(Role role, std::string_view prompt, int index, std::string_view content) {
  add_raw(role, fingerprint(prompt), index, content);
}

void FixtureStore::add_raw(Role role, std::string_view fp, int index, std::string_view content) {
  entries_[fixture_key(role, fp, index)] = std::string(content);
}

std::optional<std::string> FixtureStore::find(Role role, std::string_view fp, int index) const {
  const auto it = entries_.find(fixture_key(role, fp, index));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

FixtureStore FixtureStore::load_dir(const std::filesystem::path& dir) {
  FixtureStore store;
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("fixture directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("role") || !j.contains("fingerprint") ||
          !j.contains("index") || !j.contains("content"))
        throw ConfigError(entry.path().string() + ":" + std::to_string(lineno) +
                          ": expected {role, fingerprint, index, content}");
      store.add_raw(role_from_string(j["role"].get<std::string>()),
                    j["fingerprint"].get<std::string>(), j["index"].get<int>(),
                    j["content"].get<std::string>());
    }
  }
  return store;
}

void FixtureStore::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  // Sorted for reproducible files.
  std::map<std::string, std::string> sorted(entries_.begin(), entries_.end());
  for (const auto& [key, content] : sorted) {
    const auto first = key.find('\x1f');
    const auto second = key.find('\x1f', first + 1);
    json j;
    j["role"] = key.substr(0, first);
    j["fingerprint"] = key.substr(first + 1, second - first - 1);
    j["index"] = std::stoi(key.substr(second + 1));
    j["content"] = content;
    out << j.dump() << '\n';
  }
}

struct ScriptedServer::Impl {
  FixtureStore store;
  std::map<std::string, Role> model_roles;
  Options options;

  httplib::Server server;
  std::thread serve_thread;
  int port = 0;

  std::atomic<int> in_flight{0};
  std::atomic<int> high_water{0};
  std::atomic<std::uint64_t> requests{0};
  std::atomic<int> failures_pending{0};
  std::atomic<int> failure_status{500};

  struct FlightGuard {
    Impl& impl;
    explicit FlightGuard(Impl& i) : impl(i) {
      impl.requests.fetch_add(1, std::memory_order_relaxed);
      const int now = impl.in_flight.fetch_add(1, std::memory_order_acq_rel) + 1;
      int seen = impl.high_water.load(std::memory_order_relaxed);
      while (now > seen &&
             !impl.high_water.compare_exchange_weak(seen, now, std::memory_order_relaxed)) {
      }
    }
    ~FlightGuard() { impl.in_flight.fetch_sub(1, std::memory_order_acq_rel); }
  };

  bool maybe_fail(httplib::Response& res) {
    int pending = failures_pending.load(std::memory_order_relaxed);
    while (pending > 0) {
      if (failures_pending.compare_exchange_weak(pending, pending - 1,
                                                 std::memory_order_relaxed)) {
        res.status = failure_status.load(std::memory_order_relaxed);
        res.set_content("{\"error\":\"scripted failure\"}", "application/json");
        return true;
      }
    }
    return false;
  }

  void handle_completions(const httplib::Request& req, httplib::Response& res) {
    FlightGuard guard(*this);
    if (options.response_delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(options.response_delay_ms));
    if (maybe_fail(res)) return;

    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("model") || !body.contains("messages") ||
        !body["messages"].is_array() || body["messages"].empty()) {
      res.status = 400;
      res.set_content("{\"error\":\"malformed request\"}", "application/json");
      return;
    }
    const std::string model = body["model"].get<std::string>();
    const auto role_it = model_roles.find(model);
    if (role_it == model_roles.end()) {
      res.status = 404;
      res.set_content("{\"error\":\"unknown model '" + model + "'\"}", "application/json");
      return;
    }
    std::string last_user;
    for (const auto& m : body["messages"]) {
      if (m.value("role", "") == "user") last_user = m.value("content", "");
    }
    const std::string fp = fingerprint(last_user);
    const int n = body.value("n", 1);

    json choices = json::array();
    for (int i = 0; i < n; ++i) {
      auto content = store.find(role_it->second, fp, i);
      if (!content) {
        if (options.strict) {
          res.status = 404;
          json err;
          err["error"] = "no fixture";
          err["role"] = to_string(role_it->second);
          err["fingerprint"] = fp;
          err["index"] = i;
          res.set_content(err.dump(), "application/json");
          return;
        }
        content = options.default_content;
      }
      choices.push_back({{"index", i}, {"message", {{"role", "assistant"},
                                                    {"content", *content}}}});
    }
    json reply;
    reply["choices"] = choices;
    res.set_content(reply.dump(), "application/json");
  }

  void handle_embeddings(const httplib::Request& req, httplib::Response& res) {
    FlightGuard guard(*this);
    if (options.response_delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(options.response_delay_ms));
    if (maybe_fail(res)) return;

    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("input") || !body["input"].is_array()) {
      res.status = 400;
      res.set_content("{\"error\":\"malformed request\"}", "application/json");
      return;
    }
    json data = json::array();
    for (const auto& item : body["input"]) {
      const std::string text = item.get<std::string>();
      const std::string fp = fingerprint(text);
      auto fixture = store.find(Role::embeddings, fp, 0);
      json vec = json::array();
      if (fixture) {
        json parsed = json::parse(*fixture, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_array()) {
          res.status = 500;
          res.set_content("{\"error\":\"bad embedding fixture\"}", "application/json");
          return;
        }
        vec = parsed;
      } else if (options.strict) {
        res.status = 404;
        json err;
        err["error"] = "no fixture";
        err["role"] = "embeddings";
        err["fingerprint"] = fp;
        res.set_content(err.dump(), "application/json");
        return;
      } else {
        // Deterministic pseudo-random unit vector derived from the text.
        SplitMix64 rng(fnv1a64(text));
        std::vector<double> v(static_cast<std::size_t>(options.embedding_dim));
        double norm = 0.0;
        for (double& x : v) {
          x = static_cast<double>(rng.next() >> 11) / 9007199254740992.0 - 0.5;
          norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double x : v) vec.push_back(x / norm);
      }
      data.push_back({{"embedding", vec}});
    }
    json reply;
    reply["data"] = data;
    res.set_content(reply.dump(), "application/json");
  }
};

ScriptedServer::ScriptedServer(FixtureStore store, std::map<std::string, Role> model_roles)
    : ScriptedServer(std::move(store), std::move(model_roles), Options{}) {}

ScriptedServer::ScriptedServer(FixtureStore store, std::map<std::string, Role> model_roles,
                               Options options)
    : impl_(std::make_unique<Impl>()) {
  impl_->store = std::move(store);
  impl_->model_roles = std::move(model_roles);
  impl_->options = options;
  const int threads = options.threads;
  impl_->server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  impl_->server.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       impl_->handle_completions(req, res);
                     });
  impl_->server.Post("/v1/embeddings",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       impl_->handle_embeddings(req, res);
                     });
}

ScriptedServer::~ScriptedServer() { stop(); }

int ScriptedServer::start(int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  } else {
    impl_->port = impl_->server.bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (impl_->port <= 0)
    throw ConfigError("scripted server: failed to bind 127.0.0.1:" + std::to_string(port));
  impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void ScriptedServer::stop() {
  if (impl_->serve_thread.joinable()) {
    impl_->server.stop();
    impl_->serve_thread.join();
  }
}

int ScriptedServer::port() const { return impl_->port; }

std::string ScriptedServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

int ScriptedServer::max_in_flight() const {
  return impl_->high_water.load(std::memory_order_relaxed);
}

std::uint64_t ScriptedServer::total_requests() const {
  return impl_->requests.load(std::memory_order_relaxed);
}

void ScriptedServer::fail_next(int count, int status) {
  impl_->failure_status.store(status, std::memory_order_relaxed);
  impl_->failures_pending.store(count, std::memory_order_relaxed);
}

}  // namespace critloop
