#include "critloop/endpoint.hpp"

#include "critloop/errors.hpp"

namespace critloop {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::policy: return "policy";
    case Role::critic: return "critic";
    case Role::judge: return "judge";
    case Role::extractor: return "extractor";
    case Role::embeddings: return "embeddings";
  }
  return "policy";
}

Role role_from_string(std::string_view name) {
  if (name == "policy") return Role::policy;
  if (name == "critic") return Role::critic;
  if (name == "judge") return Role::judge;
  if (name == "extractor") return Role::extractor;
  if (name == "embeddings") return Role::embeddings;
  throw ConfigError("unknown endpoint role '" + std::string(name) + "'");
}

void SamplingParams::validate() const {
  if (temperature < 0.0) throw ConfigError("sampling: temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("sampling: top_p must lie in (0, 1]");
  if (n < 1) throw ConfigError("sampling: n must be >= 1");
  if (max_tokens < 1) throw ConfigError("sampling: max_tokens must be >= 1");
}

void Endpoint::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint: base_url is empty");
  if (model_name.empty()) throw ConfigError("endpoint: model_name is empty");
  if (max_concurrency < 1) throw ConfigError("endpoint: max_concurrency must be >= 1");
  if (retry_budget < 0) throw ConfigError("endpoint: retry_budget must be >= 0");
}

}  // namespace critloop
