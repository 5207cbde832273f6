#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "critloop/codec.hpp"
#include "critloop/config.hpp"
#include "critloop/eval.hpp"
#include "critloop/manifest.hpp"

namespace critloop {

// A validated config plus the hash of its file bytes, shared by every
// command so manifests can pin the exact configuration.
struct CommandContext {
  RunConfig config;
  std::string config_sha256;
};

CommandContext make_context(const std::filesystem::path& config_file);

// File conventions under the configured directories.
namespace files {
std::filesystem::path problems(const Paths& paths);
std::filesystem::path curated(const Paths& paths);
std::filesystem::path probe_solutions(const Paths& paths);
std::filesystem::path sft_accepted(const Paths& paths);
std::filesystem::path sft_stats(const Paths& paths);
std::filesystem::path process_cases(const Paths& paths);
std::filesystem::path pool_file(const Paths& paths, const std::string& problem_id);
std::filesystem::path eval_report(const Paths& paths, const std::string& benchmark);
std::filesystem::path eval_summary(const Paths& paths, const std::string& benchmark);
std::filesystem::path process_report(const Paths& paths, const std::string& benchmark);
}  // namespace files

// curate: exact + semantic dedup, judge screening, difficulty balancing.
// Writes the surviving corpus and the difficulty-probe solutions.
struct CurateResult {
  std::filesystem::path curated_file;
  std::filesystem::path probe_solutions_file;
  int input_count = 0;
  int exact_dropped = 0;
  int semantic_dropped = 0;
  int judge_dropped_unsolvable = 0;
  int judge_dropped_proof = 0;
  int judge_dropped_multiple_choice = 0;
  int judge_dropped_unparseable = 0;
  int difficulty_dropped = 0;
  int survivors = 0;
};
CurateResult run_curate(const CommandContext& ctx);

// collect-sft: sample critiques for balanced (one correct, one incorrect)
// solutions and keep only those passing the rejection-sampling screens.
struct SftResult {
  std::filesystem::path accepted_file;
  std::filesystem::path stats_file;
  int critiques_total = 0;
  int accepted = 0;
  std::map<std::string, int> rejections;  // reason -> count
};
SftResult run_collect_sft(const CommandContext& ctx);

// rl-step: one GRPO rollout (G critiques per input, gated refinements when
// lambda > 0), rewards, group advantages and a batch file for the trainer.
struct RlStepResult {
  bool halted = false;  // schedule complete: no batch emitted
  std::filesystem::path batch_file;
  double lambda = 0.0;
  int inputs = 0;
  int gated_refinements = 0;
};
RlStepResult run_rl_step(const CommandContext& ctx, int step);

// build-pools: materialize frozen response pools for every curated problem.
struct BuildPoolsResult {
  std::vector<std::filesystem::path> pool_files;
};
BuildPoolsResult run_build_pools(const CommandContext& ctx);

// evaluate: Pass_r@1 plus Maj@N / Maj_c@N over the frozen pools, averaged
// over seeded trials.
struct EvaluateResult {
  std::filesystem::path report_file;
  std::filesystem::path summary_file;
  std::vector<MetricRecord> metrics;
};
EvaluateResult run_evaluate(const CommandContext& ctx, std::vector<int> n_values = {});

// score-process: render extraction prompts, query the extractor endpoint and
// score step-level error localization.
struct ScoreProcessResult {
  std::filesystem::path report_file;
  ProcessScore score;
  int cases = 0;
  int abstains = 0;
};
ScoreProcessResult run_score_process(const CommandContext& ctx,
                                     std::filesystem::path cases_file = {});

}  // namespace critloop
