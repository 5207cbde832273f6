#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "critloop/endpoint.hpp"
#include "critloop/reward.hpp"

namespace critloop {

struct EvalConfig {
  std::string benchmark = "default";
  int pool_size = 128;
  int trials = 1000;
  std::optional<std::uint64_t> seed;  // defaults to the run seed
  std::vector<int> n_values{8, 64};
};

struct CurationConfig {
  double dedup_threshold = 0.95;
  int difficulty_samples = 8;
  int judge_retries = 2;
  bool semantic_dedup = true;
};

struct Paths {
  std::filesystem::path corpus;   // problems.jsonl and derived corpus files
  std::filesystem::path pools;    // pool-<problem>.jsonl
  std::filesystem::path batches;  // batch-<step>.jsonl
  std::filesystem::path reports;  // metrics, manifests, summaries
};

// The single run configuration: endpoints per role, per-role sampling
// parameters, reward schedule, evaluation settings and data directories.
// Loaded from a JSON file; endpoint URLs, models and API keys can be
// overridden with CRITLOOP_<ROLE>_URL / _MODEL / _KEY environment variables.
struct RunConfig {
  std::uint64_t seed = 0;
  std::vector<Endpoint> endpoints;
  std::map<Role, SamplingParams> sampling;
  RewardConfig reward;
  int rl_inputs_per_step = 128;
  int sft_samples_per_solution = 1;
  CurationConfig curation;
  EvalConfig eval;
  Paths paths;

  const Endpoint* find_endpoint(Role role) const;
  const Endpoint& require_endpoint(Role role) const;
  SamplingParams sampling_for(Role role) const;
  std::uint64_t eval_seed() const { return eval.seed.value_or(seed); }

  void validate() const;
};

// Parses the file, applies environment overrides, validates. Relative paths
// resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& file);

// The raw config file bytes (hashed into manifests).
std::string read_file(const std::filesystem::path& file);

}  // namespace critloop
