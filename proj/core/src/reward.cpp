#include "critloop/reward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "critloop/errors.hpp"

namespace critloop {

double judgment_reward(bool solution_correct, bool judged_correct) {
  return solution_correct == judged_correct ? 1.0 : 0.0;
}

namespace {

double refinement_mean(bool solution_correct, bool judged_correct, std::size_t count,
                       std::size_t successes) {
  const bool gated = !solution_correct && !judged_correct;
  if (!gated) return 0.0;
  if (count == 0)
    throw ContractViolation(
        "refinement_reward: rollouts were mandatory for a correctly flagged incorrect solution");
  return static_cast<double>(successes) / static_cast<double>(count);
}

}  // namespace

double refinement_reward(bool solution_correct, bool judged_correct,
                         std::span<const bool> outcomes) {
  std::size_t successes = 0;
  for (bool ok : outcomes) successes += ok ? 1 : 0;
  return refinement_mean(solution_correct, judged_correct, outcomes.size(), successes);
}

double refinement_reward(bool solution_correct, bool judged_correct,
                         const std::vector<bool>& outcomes) {
  std::size_t successes = 0;
  for (bool ok : outcomes) successes += ok ? 1 : 0;
  return refinement_mean(solution_correct, judged_correct, outcomes.size(), successes);
}

double lambda_schedule(int step, const RewardConfig& config) {
  if (step < 0) throw ContractViolation("lambda_schedule: negative step");
  if (step >= config.total_steps())
    throw ContractViolation("lambda_schedule: step " + std::to_string(step) +
                            " is past the end of the schedule (" +
                            std::to_string(config.total_steps()) + " steps)");
  return step < config.stage1_steps ? 0.0 : config.lambda;
}

bool training_complete(int step, const RewardConfig& config) {
  return step >= config.total_steps();
}

double combined_reward(double judgment, double refinement, double lambda) {
  if (judgment != 0.0 && judgment != 1.0)
    throw ContractViolation("combined_reward: judgment reward must be 0 or 1");
  if (refinement < 0.0 || refinement > 1.0)
    throw ContractViolation("combined_reward: refinement reward must lie in [0, 1]");
  return judgment + lambda * refinement;
}

std::vector<double> group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2)
    throw ContractViolation("group_advantages: group size must be >= 2");
  if (!(epsilon > 0.0)) throw ContractViolation("group_advantages: epsilon must be positive");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double variance = 0.0;
  for (double r : rewards) variance += (r - mean) * (r - mean);
  variance /= n;  // population variance
  const double denom = std::sqrt(variance) + epsilon;
  std::vector<double> advantages;
  advantages.reserve(rewards.size());
  for (double r : rewards) advantages.push_back((r - mean) / denom);
  return advantages;
}

std::string batch_file_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "batch-%06d.jsonl", step);
  return buf;
}

std::filesystem::path export_training_batch(std::span<const TrainingExample> examples, int step,
                                            int group_size, int expected_inputs,
                                            const std::filesystem::path& batch_dir) {
  std::map<std::string, std::vector<const TrainingExample*>> groups;
  for (const auto& ex : examples) groups[ex.record.group_id].push_back(&ex);

  if (static_cast<int>(groups.size()) != expected_inputs)
    throw BatchError("batch for step " + std::to_string(step) + " covers " +
                     std::to_string(groups.size()) + " inputs, expected " +
                     std::to_string(expected_inputs));

  for (auto& [group_id, members] : groups) {
    std::sort(members.begin(), members.end(), [](const auto* a, const auto* b) {
      return a->record.critique_index < b->record.critique_index;
    });
    std::vector<int> missing;
    std::size_t at = 0;
    for (int want = 0; want < group_size; ++want) {
      if (at < members.size() && members[at]->record.critique_index == want)
        ++at;
      else
        missing.push_back(want);
    }
    if (!missing.empty() || static_cast<int>(members.size()) != group_size) {
      std::string what = "group '" + group_id + "' is incomplete; missing critique indices:";
      for (int idx : missing) what += " " + std::to_string(idx);
      throw BatchError(what, missing);
    }
  }

  std::filesystem::create_directories(batch_dir);
  const std::filesystem::path path = batch_dir / batch_file_name(step);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& [group_id, members] : groups) {
    for (const TrainingExample* ex : members) {
      nlohmann::json j;
      j["step"] = step;
      j["problem_id"] = ex->record.problem_id;
      j["critique_index"] = ex->record.critique_index;
      j["prompt"] = ex->prompt;
      j["critique"] = ex->critique;
      j["reward"] = ex->record.reward;
      j["advantage"] = ex->record.advantage;
      j["group_id"] = ex->record.group_id;
      out << j.dump() << '\n';
    }
  }
  return path;
}

}  // namespace critloop
