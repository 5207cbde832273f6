#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "critloop/endpoint.hpp"

namespace critloop {

// Completion fixtures keyed by (endpoint role, fingerprint of the last user
// message, choice index). Persisted as line-delimited records
// {role, fingerprint, index, content} across any number of *.jsonl files.
class FixtureStore {
 public:
  FixtureStore() = default;

  // Keyed by prompt text; the fingerprint is computed here.
  void add(Role role, std::string_view prompt, int index, std::string_view content);
  void add_raw(Role role, std::string_view fingerprint, int index, std::string_view content);

  std::optional<std::string> find(Role role, std::string_view fingerprint, int index) const;
  std::size_t size() const { return entries_.size(); }

  static FixtureStore load_dir(const std::filesystem::path& dir);
  void save(const std::filesystem::path& file) const;

 private:
  std::unordered_map<std::string, std::string> entries_;
};

// Deterministic loopback stand-in for the inference endpoints. Serves
// /v1/chat/completions and /v1/embeddings from the fixture store; identical
// requests always produce identical replies. In strict mode unknown
// fingerprints get a 404 naming the missing fixture; otherwise a default
// completion (or a hash-derived unit embedding) is returned.
class ScriptedServer {
 public:
  struct Options {
    bool strict = false;
    std::string default_content = "UNSCRIPTED";
    int embedding_dim = 8;
    int response_delay_ms = 0;  // per-request artificial latency
    int threads = 16;
  };

  ScriptedServer(FixtureStore store, std::map<std::string, Role> model_roles);
  ScriptedServer(FixtureStore store, std::map<std::string, Role> model_roles, Options options);
  ~ScriptedServer();

  ScriptedServer(const ScriptedServer&) = delete;
  ScriptedServer& operator=(const ScriptedServer&) = delete;

  // Binds 127.0.0.1 and serves until stop(). port 0 picks a free port;
  // returns the bound port.
  int start(int port = 0);
  void stop();

  int port() const;
  std::string base_url() const;

  // Instrumentation for concurrency-bound checks.
  int max_in_flight() const;
  std::uint64_t total_requests() const;

  // Scripted failures: the next `count` requests answer with `status`.
  void fail_next(int count, int status);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace critloop
