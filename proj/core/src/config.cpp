#include "critloop/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "critloop/errors.hpp"

namespace critloop {
namespace {

using nlohmann::json;

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<std::string> env_override(Role role, const char* suffix) {
  const std::string name = "CRITLOOP_" + upper(to_string(role)) + "_" + suffix;
  if (const char* value = std::getenv(name.c_str()); value && *value) return std::string(value);
  return std::nullopt;
}

SamplingParams parse_sampling(const json& j, SamplingParams base) {
  if (j.contains("temperature")) base.temperature = j["temperature"].get<double>();
  if (j.contains("top_p")) base.top_p = j["top_p"].get<double>();
  if (j.contains("n")) base.n = j["n"].get<int>();
  if (j.contains("max_tokens")) base.max_tokens = j["max_tokens"].get<int>();
  return base;
}

}  // namespace

const Endpoint* RunConfig::find_endpoint(Role role) const {
  for (const auto& ep : endpoints)
    if (ep.role == role) return &ep;
  return nullptr;
}

const Endpoint& RunConfig::require_endpoint(Role role) const {
  const Endpoint* ep = find_endpoint(role);
  if (!ep)
    throw ConfigError("no endpoint configured for role '" + std::string(to_string(role)) + "'");
  return *ep;
}

SamplingParams RunConfig::sampling_for(Role role) const {
  const auto it = sampling.find(role);
  return it != sampling.end() ? it->second : SamplingParams{};
}

void RunConfig::validate() const {
  std::set<Role> seen;
  for (const auto& ep : endpoints) {
    ep.validate();
    if (!seen.insert(ep.role).second)
      throw ConfigError("duplicate endpoint for role '" + std::string(to_string(ep.role)) + "'");
  }
  for (const auto& [role, params] : sampling) {
    (void)role;
    params.validate();
  }
  if (reward.lambda < 0.0) throw ConfigError("reward.lambda must be >= 0");
  if (reward.m < 1) throw ConfigError("reward.m must be >= 1");
  if (reward.group_size < 2) throw ConfigError("reward.group_size must be >= 2");
  if (reward.stage1_steps < 0 || reward.stage2_steps < 0)
    throw ConfigError("reward stage lengths must be >= 0");
  if (!(reward.epsilon > 0.0)) throw ConfigError("reward.epsilon must be positive");
  if (rl_inputs_per_step < 1) throw ConfigError("rl.inputs_per_step must be >= 1");
  if (sft_samples_per_solution < 1) throw ConfigError("sft.samples_per_solution must be >= 1");
  if (!(curation.dedup_threshold > 0.0 && curation.dedup_threshold <= 1.0))
    throw ConfigError("curation.dedup_threshold must lie in (0, 1]");
  if (curation.difficulty_samples < 1)
    throw ConfigError("curation.difficulty_samples must be >= 1");
  if (curation.judge_retries < 0) throw ConfigError("curation.judge_retries must be >= 0");
  if (eval.pool_size < 1) throw ConfigError("eval.pool_size must be >= 1");
  if (eval.trials < 1) throw ConfigError("eval.trials must be >= 1");
  if (eval.n_values.empty()) throw ConfigError("eval.n_values must not be empty");
  for (int n : eval.n_values)
    if (n < 1) throw ConfigError("eval.n_values entries must be >= 1");
  if (paths.corpus.empty() || paths.pools.empty() || paths.batches.empty() ||
      paths.reports.empty())
    throw ConfigError("paths.{corpus,pools,batches,reports} must all be set");
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig load_run_config(const std::filesystem::path& file) {
  json j = json::parse(read_file(file), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config " + file.string() + " is not a JSON object");

  RunConfig cfg;
  if (!j.contains("seed")) throw ConfigError("config: 'seed' is mandatory");
  cfg.seed = j["seed"].get<std::uint64_t>();

  if (!j.contains("endpoints") || !j["endpoints"].is_array())
    throw ConfigError("config: 'endpoints' must be an array");
  for (const auto& e : j["endpoints"]) {
    Endpoint ep;
    ep.role = role_from_string(e.value("role", ""));
    ep.base_url = e.value("base_url", "");
    ep.model_name = e.value("model", "");
    ep.max_concurrency = e.value("max_concurrency", 4);
    ep.retry_budget = e.value("retry_budget", 3);
    if (auto url = env_override(ep.role, "URL")) ep.base_url = *url;
    if (auto model = env_override(ep.role, "MODEL")) ep.model_name = *model;
    if (auto key = env_override(ep.role, "KEY")) ep.api_key = *key;
    cfg.endpoints.push_back(std::move(ep));
  }

  if (j.contains("sampling")) {
    for (const auto& [key, value] : j["sampling"].items())
      cfg.sampling[role_from_string(key)] = parse_sampling(value, SamplingParams{});
  }

  if (j.contains("reward")) {
    const auto& r = j["reward"];
    cfg.reward.lambda = r.value("lambda", cfg.reward.lambda);
    cfg.reward.m = r.value("m", cfg.reward.m);
    cfg.reward.group_size = r.value("group_size", cfg.reward.group_size);
    cfg.reward.stage1_steps = r.value("stage1_steps", cfg.reward.stage1_steps);
    cfg.reward.stage2_steps = r.value("stage2_steps", cfg.reward.stage2_steps);
    cfg.reward.epsilon = r.value("epsilon", cfg.reward.epsilon);
  }

  if (j.contains("rl")) cfg.rl_inputs_per_step = j["rl"].value("inputs_per_step", 128);
  if (j.contains("sft"))
    cfg.sft_samples_per_solution = j["sft"].value("samples_per_solution", 1);

  if (j.contains("curation")) {
    const auto& c = j["curation"];
    cfg.curation.dedup_threshold = c.value("dedup_threshold", cfg.curation.dedup_threshold);
    cfg.curation.difficulty_samples =
        c.value("difficulty_samples", cfg.curation.difficulty_samples);
    cfg.curation.judge_retries = c.value("judge_retries", cfg.curation.judge_retries);
    cfg.curation.semantic_dedup = c.value("semantic_dedup", cfg.curation.semantic_dedup);
  }

  if (j.contains("eval")) {
    const auto& e = j["eval"];
    cfg.eval.benchmark = e.value("benchmark", cfg.eval.benchmark);
    cfg.eval.pool_size = e.value("pool_size", cfg.eval.pool_size);
    cfg.eval.trials = e.value("trials", cfg.eval.trials);
    if (e.contains("seed")) cfg.eval.seed = e["seed"].get<std::uint64_t>();
    if (e.contains("n_values")) cfg.eval.n_values = e["n_values"].get<std::vector<int>>();
  }

  if (!j.contains("paths")) throw ConfigError("config: 'paths' is mandatory");
  const auto& p = j["paths"];
  const std::filesystem::path base = std::filesystem::absolute(file).parent_path();
  auto resolve = [&](const char* key) -> std::filesystem::path {
    const std::string value = p.value(key, "");
    if (value.empty()) throw ConfigError(std::string("config: paths.") + key + " is missing");
    std::filesystem::path path(value);
    return path.is_absolute() ? path : base / path;
  };
  cfg.paths.corpus = resolve("corpus");
  cfg.paths.pools = resolve("pools");
  cfg.paths.batches = resolve("batches");
  cfg.paths.reports = resolve("reports");

  cfg.validate();
  return cfg;
}

}  // namespace critloop
