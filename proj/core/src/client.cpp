#include "critloop/client.hpp"

#include <cmath>
#include <random>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "critloop/errors.hpp"

namespace critloop {
namespace {

using nlohmann::json;

bool transient_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status < 600);
}

struct UsageRegistry {
  std::mutex mutex;
  std::map<std::string, EndpointUsage> usage;

  static UsageRegistry& instance() {
    static UsageRegistry registry;
    return registry;
  }

  void bump(const Endpoint& ep, std::uint64_t requests, std::uint64_t retries,
            std::uint64_t failures) {
    std::lock_guard<std::mutex> lock(mutex);
    EndpointUsage& u = usage[std::string(to_string(ep.role)) + " " + ep.model_name];
    u.requests += requests;
    u.retries += retries;
    u.failures += failures;
  }
};

}  // namespace

std::map<std::string, EndpointUsage> endpoint_usage_snapshot() {
  UsageRegistry& registry = UsageRegistry::instance();
  std::lock_guard<std::mutex> lock(registry.mutex);
  return registry.usage;
}

struct InferenceClient::Impl {
  explicit Impl(int max_concurrency) : slots(max_concurrency) {}

  std::counting_semaphore<> slots;
  std::mt19937_64 jitter_rng{std::random_device{}()};
  std::mutex jitter_mutex;

  double jitter_factor() {
    std::lock_guard<std::mutex> lock(jitter_mutex);
    return 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(jitter_rng);
  }
};

InferenceClient::InferenceClient(Endpoint endpoint, RetryPolicy retry)
    : endpoint_(std::move(endpoint)),
      retry_(retry),
      impl_(std::make_unique<Impl>(endpoint_.max_concurrency)) {
  endpoint_.validate();
}

InferenceClient::~InferenceClient() = default;

namespace {

struct HttpOutcome {
  bool connected = false;
  int status = 0;
  std::string body;
};

HttpOutcome post_json(const Endpoint& endpoint, const std::string& path,
                      const std::string& body) {
  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(600, 0);
  client.set_write_timeout(60, 0);
  httplib::Headers headers;
  if (!endpoint.api_key.empty())
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  auto res = client.Post(path, headers, body, "application/json");
  if (!res) return {};
  return {true, res->status, res->body};
}

}  // namespace

SampleResult InferenceClient::sample_completions(std::span<const Message> messages,
                                                 const SamplingParams& params) {
  params.validate();
  if (messages.empty()) throw ContractViolation("sample_completions: empty message list");

  json body;
  body["model"] = endpoint_.model_name;
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role},
                                                             {"content", m.content}});
  body["temperature"] = params.temperature;
  body["top_p"] = params.top_p;
  body["n"] = params.n;
  body["max_tokens"] = params.max_tokens;
  const std::string payload = body.dump();

  int last_status = 0;
  for (int attempt = 0;; ++attempt) {
    stats_.requests.fetch_add(1, std::memory_order_relaxed);
    UsageRegistry::instance().bump(endpoint_, 1, 0, 0);
    impl_->slots.acquire();
    HttpOutcome outcome;
    try {
      outcome = post_json(endpoint_, "/v1/chat/completions", payload);
    } catch (...) {
      impl_->slots.release();
      throw;
    }
    impl_->slots.release();

    if (outcome.connected && outcome.status == 200) {
      json reply = json::parse(outcome.body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array())
        throw WireError("endpoint '" + endpoint_.model_name + "': malformed completion reply");
      const auto& choices = reply["choices"];
      if (static_cast<int>(choices.size()) != params.n)
        throw WireError("endpoint '" + endpoint_.model_name + "': expected " +
                        std::to_string(params.n) + " choices, got " +
                        std::to_string(choices.size()));
      std::vector<std::string> texts(static_cast<std::size_t>(params.n));
      std::vector<bool> filled(static_cast<std::size_t>(params.n), false);
      for (const auto& choice : choices) {
        if (!choice.contains("index") || !choice.contains("message") ||
            !choice["message"].contains("content"))
          throw WireError("endpoint '" + endpoint_.model_name + "': malformed choice");
        const int index = choice["index"].get<int>();
        if (index < 0 || index >= params.n || filled[static_cast<std::size_t>(index)])
          throw WireError("endpoint '" + endpoint_.model_name + "': bad choice index " +
                          std::to_string(index));
        texts[static_cast<std::size_t>(index)] = choice["message"]["content"].get<std::string>();
        filled[static_cast<std::size_t>(index)] = true;
      }
      return {std::move(texts), attempt};
    }

    last_status = outcome.connected ? outcome.status : 0;
    const bool transient = !outcome.connected || transient_status(outcome.status);
    if (!transient) {
      stats_.failures.fetch_add(1, std::memory_order_relaxed);
      UsageRegistry::instance().bump(endpoint_, 0, 0, 1);
      throw EndpointError(endpoint_.model_name, last_status,
                          "endpoint '" + endpoint_.model_name + "' replied with status " +
                              std::to_string(last_status));
    }
    if (attempt >= endpoint_.retry_budget) {
      stats_.failures.fetch_add(1, std::memory_order_relaxed);
      UsageRegistry::instance().bump(endpoint_, 0, 0, 1);
      throw EndpointError(endpoint_.model_name, last_status,
                          "endpoint '" + endpoint_.model_name + "' failed after " +
                              std::to_string(attempt + 1) + " attempts (last status " +
                              std::to_string(last_status) + ")");
    }
    stats_.retries.fetch_add(1, std::memory_order_relaxed);
    UsageRegistry::instance().bump(endpoint_, 0, 1, 0);
    auto delay = retry_.base_delay * std::pow(retry_.multiplier, attempt);
    if (retry_.jitter) delay *= impl_->jitter_factor();
    std::this_thread::sleep_for(
        std::chrono::duration_cast<std::chrono::milliseconds>(delay));
  }
}

std::vector<std::vector<double>> InferenceClient::fetch_embeddings(
    std::span<const std::string> inputs) {
  if (inputs.empty()) return {};
  json body;
  body["model"] = endpoint_.model_name;
  body["input"] = json::array();
  for (const auto& text : inputs) body["input"].push_back(text);
  const std::string payload = body.dump();

  int last_status = 0;
  for (int attempt = 0;; ++attempt) {
    stats_.requests.fetch_add(1, std::memory_order_relaxed);
    UsageRegistry::instance().bump(endpoint_, 1, 0, 0);
    impl_->slots.acquire();
    HttpOutcome outcome;
    try {
      outcome = post_json(endpoint_, "/v1/embeddings", payload);
    } catch (...) {
      impl_->slots.release();
      throw;
    }
    impl_->slots.release();

    if (outcome.connected && outcome.status == 200) {
      json reply = json::parse(outcome.body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array() ||
          reply["data"].size() != inputs.size())
        throw WireError("embeddings endpoint: malformed reply");
      std::vector<std::vector<double>> out;
      out.reserve(inputs.size());
      for (const auto& item : reply["data"]) {
        if (!item.contains("embedding") || !item["embedding"].is_array())
          throw WireError("embeddings endpoint: entry without embedding");
        std::vector<double> vec = item["embedding"].get<std::vector<double>>();
        double norm = 0.0;
        for (double v : vec) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw WireError("embeddings endpoint: zero vector");
        for (double& v : vec) v /= norm;
        out.push_back(std::move(vec));
      }
      return out;
    }

    last_status = outcome.connected ? outcome.status : 0;
    const bool transient = !outcome.connected || transient_status(outcome.status);
    if (!transient || attempt >= endpoint_.retry_budget) {
      stats_.failures.fetch_add(1, std::memory_order_relaxed);
      UsageRegistry::instance().bump(endpoint_, 0, 0, 1);
      throw EndpointError(endpoint_.model_name, last_status,
                          "embeddings endpoint failed (last status " +
                              std::to_string(last_status) + ")");
    }
    stats_.retries.fetch_add(1, std::memory_order_relaxed);
    UsageRegistry::instance().bump(endpoint_, 0, 1, 0);
    auto delay = retry_.base_delay * std::pow(retry_.multiplier, attempt);
    if (retry_.jitter) delay *= impl_->jitter_factor();
    std::this_thread::sleep_for(
        std::chrono::duration_cast<std::chrono::milliseconds>(delay));
  }
}

}  // namespace critloop
