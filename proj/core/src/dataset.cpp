#include "critloop/dataset.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

#include "critloop/errors.hpp"
#include "critloop/hashing.hpp"
#include "critloop/rng.hpp"

namespace critloop {
namespace {

constexpr std::string_view kSpecialChars = "$[](){}\\";

}  // namespace

std::string canonicalize_statement(std::string_view statement) {
  std::string out;
  out.reserve(statement.size());
  bool pending_space = false;
  for (char c : statement) {
    if (kSpecialChars.find(c) != std::string_view::npos) continue;
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw ContractViolation("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ContractViolation("cosine_similarity: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<ProblemRecord> dedup_exact(std::span<const ProblemRecord> problems) {
  std::vector<ProblemRecord> kept;
  kept.reserve(problems.size());
  std::unordered_set<std::string> seen;
  for (const auto& rec : problems) {
    if (seen.insert(canonicalize_statement(rec.statement)).second) kept.push_back(rec);
  }
  return kept;
}

std::vector<ProblemRecord> dedup(std::span<const ProblemRecord> problems, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ConfigError("dedup: threshold must lie in (0, 1]");
  const std::vector<ProblemRecord> exact = dedup_exact(problems);
  for (const auto& rec : exact) {
    if (!rec.embedding)
      throw ConfigError("dedup: record '" + rec.id + "' has no embedding for the semantic stage");
  }
  std::vector<ProblemRecord> kept;
  kept.reserve(exact.size());
  for (const auto& rec : exact) {
    bool duplicate = false;
    for (const auto& prior : kept) {
      if (cosine_similarity(*rec.embedding, *prior.embedding) > threshold) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(rec);
  }
  return kept;
}

JudgeVerdict judge_screen(const ProblemRecord& problem, std::string_view judge_reply) {
  const auto boxed = extract_boxed(judge_reply);
  if (!boxed)
    throw JudgeParseError("judge reply for '" + problem.id + "' carries no boxed label");
  std::string label = boxed->canonical;
  for (char& c : label) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (label == "SOLVABLE") return JudgeVerdict::keep;
  if (label == "UNSOLVABLE") return JudgeVerdict::drop_unsolvable;
  if (label == "PROOF") return JudgeVerdict::drop_proof;
  if (label == "MULTIPLE_CHOICE") return JudgeVerdict::drop_multiple_choice;
  throw JudgeParseError("judge reply for '" + problem.id + "' has unknown label '" + label + "'");
}

DifficultyDecision difficulty_balance(int pass_count, int n) {
  if (n < 1) throw ContractViolation("difficulty_balance: n must be >= 1");
  if (pass_count < 0 || pass_count > n)
    throw ContractViolation("difficulty_balance: pass_count outside [0, n]");
  return (pass_count == 0 || pass_count == n) ? DifficultyDecision::drop
                                              : DifficultyDecision::keep;
}

std::vector<SolutionRecord> balance_solutions(std::span<const SolutionRecord> solutions,
                                              std::uint64_t seed) {
  if (solutions.empty()) return {};
  std::vector<std::size_t> correct_idx, incorrect_idx;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (solutions[i].problem_id != solutions.front().problem_id)
      throw ContractViolation("balance_solutions: records span multiple problems");
    (solutions[i].correct ? correct_idx : incorrect_idx).push_back(i);
  }
  if (correct_idx.empty() || incorrect_idx.empty()) return {};
  SplitMix64 rng = derive_rng(seed, fnv1a64(solutions.front().problem_id));
  const auto& pick_correct = correct_idx[rng.below(correct_idx.size())];
  const auto& pick_incorrect = incorrect_idx[rng.below(incorrect_idx.size())];
  return {solutions[pick_correct], solutions[pick_incorrect]};
}

}  // namespace critloop
