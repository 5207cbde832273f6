#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace critloop {

// Reward and schedule configuration. Stage 1 trains on the judgment reward
// alone (lambda 0, no refinements sampled); stage 2 adds the refinement
// reward weighted by `lambda`.
struct RewardConfig {
  double lambda = 1.0;
  int m = 8;            // refinement rollouts per gated critique
  int group_size = 8;   // critiques sampled per input
  int stage1_steps = 600;
  int stage2_steps = 300;
  double epsilon = 1e-6;  // std guard in the advantage normalization

  int total_steps() const { return stage1_steps + stage2_steps; }
};

// One critique's reward bookkeeping inside a GRPO group.
struct RewardRecord {
  std::string problem_id;
  std::string group_id;  // distinguishes the (problem, solution) input
  int critique_index = 0;
  bool solution_correct = false;   // c
  bool judged_correct = false;     // c-hat (unparsed critiques count as wrong)
  double judgment = 0.0;           // R_j
  double refinement = 0.0;         // R_r
  double reward = 0.0;             // R_j + lambda * R_r
  double advantage = 0.0;
  std::vector<bool> refinement_correct;  // length m when a rollout ran, else empty
};

// 1 when the verdict matches the solution's true correctness, else 0.
double judgment_reward(bool solution_correct, bool judged_correct);

// Mean refinement correctness, granted only when the critic correctly flags
// an incorrect solution (c = 0 and c-hat = 0). Outcomes are mandatory in the
// granted case.
double refinement_reward(bool solution_correct, bool judged_correct,
                         std::span<const bool> outcomes);
double refinement_reward(bool solution_correct, bool judged_correct,
                         const std::vector<bool>& outcomes);

// 0 before stage1_steps, `lambda` through stage 2. Steps past the schedule
// throw ContractViolation; use training_complete() to stop cleanly.
double lambda_schedule(int step, const RewardConfig& config);
bool training_complete(int step, const RewardConfig& config);

double combined_reward(double judgment, double refinement, double lambda);

// Group-relative advantages: (r - mean) / (population std + epsilon).
// All-equal groups normalize to all zeros.
std::vector<double> group_advantages(std::span<const double> rewards, double epsilon);

// A fully assembled batch row handed to the external trainer.
struct TrainingExample {
  RewardRecord record;
  std::string prompt;    // the rendered critique prompt
  std::string critique;  // raw critic output
};

std::string batch_file_name(int step);

// Writes batch-{step:06}.jsonl. Every group must hold exactly `group_size`
// records and the batch exactly `expected_inputs` groups; violations raise
// BatchError. Output is deterministic: groups sorted by group id, records by
// critique index.
std::filesystem::path export_training_batch(std::span<const TrainingExample> examples, int step,
                                            int group_size, int expected_inputs,
                                            const std::filesystem::path& batch_dir);

}  // namespace critloop
