#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "critloop/endpoint.hpp"

namespace critloop {

// Fixed artifact contract: base 250 ms, doubling, jittered by a factor in
// [0.5, 1.5). Tests shrink the base to keep retries fast.
struct RetryPolicy {
  std::chrono::milliseconds base_delay{250};
  double multiplier = 2.0;
  bool jitter = true;
};

struct SampleResult {
  std::vector<std::string> texts;  // exactly params.n entries, in choice order
  int retries = 0;
};

struct EndpointStats {
  std::atomic<std::uint64_t> requests{0};
  std::atomic<std::uint64_t> retries{0};
  std::atomic<std::uint64_t> failures{0};
};

// Process-wide request/retry/failure counters keyed by "<role> <model>",
// aggregated across all clients; the CLI reports them when a run aborts on
// an endpoint error.
struct EndpointUsage {
  std::uint64_t requests = 0;
  std::uint64_t retries = 0;
  std::uint64_t failures = 0;
};
std::map<std::string, EndpointUsage> endpoint_usage_snapshot();

// Blocking chat-completions client for one endpoint. Thread-safe: any number
// of workers may call sample_completions concurrently; a semaphore keeps
// in-flight requests at or below the endpoint's max_concurrency.
class InferenceClient {
 public:
  explicit InferenceClient(Endpoint endpoint, RetryPolicy retry = {});
  ~InferenceClient();

  InferenceClient(const InferenceClient&) = delete;
  InferenceClient& operator=(const InferenceClient&) = delete;

  // POST /v1/chat/completions. Returns exactly params.n completion texts in
  // choice order. Transient failures (connect errors, 408/429/5xx) are
  // retried with exponential backoff up to the endpoint's retry budget;
  // anything else raises EndpointError immediately. A 200 reply that does
  // not match the wire contract raises WireError.
  SampleResult sample_completions(std::span<const Message> messages,
                                  const SamplingParams& params);

  // POST /v1/embeddings with body {input: [text...]}. Vectors are normalized
  // to unit length before being returned.
  std::vector<std::vector<double>> fetch_embeddings(std::span<const std::string> inputs);

  const Endpoint& endpoint() const { return endpoint_; }
  const EndpointStats& stats() const { return stats_; }

 private:
  struct Impl;
  Endpoint endpoint_;
  RetryPolicy retry_;
  EndpointStats stats_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace critloop
