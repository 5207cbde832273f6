#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace critloop {

enum class Role { policy, critic, judge, extractor, embeddings };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// Sampling defaults follow the evaluation setup: temperature 0.6, top_p 0.95.
struct SamplingParams {
  double temperature = 0.6;
  double top_p = 0.95;
  int n = 1;
  int max_tokens = 8192;

  void validate() const;
};

// A chat-completions-style inference endpoint. `max_concurrency` bounds
// in-flight requests; `retry_budget` is the number of retries after the
// first attempt.
struct Endpoint {
  std::string base_url;
  std::string model_name;
  Role role = Role::policy;
  int max_concurrency = 4;
  int retry_budget = 3;
  std::string api_key;  // optional bearer token, sourced from the environment

  void validate() const;
};

}  // namespace critloop
