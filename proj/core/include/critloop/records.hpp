#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critloop/answer.hpp"

namespace critloop {

// A math problem with its ground-truth final answer. The embedding (unit
// norm) is attached by the curation pipeline, never stored in corpus files.
struct ProblemRecord {
  std::string id;
  std::string statement;
  FinalAnswer answer;
  std::string source;
  std::optional<std::vector<double>> embedding;
};

// A sampled solution for one problem. `correct` is always derived via
// math_equal against the parent problem's answer; solutions without an
// extractable final answer count as incorrect.
struct SolutionRecord {
  std::string problem_id;
  std::string text;
  std::optional<FinalAnswer> extracted;
  bool correct = false;
  int sample_index = 0;
};

SolutionRecord make_solution_record(const ProblemRecord& problem, std::string text,
                                    int sample_index);

// Line-delimited corpus files: {id, statement, answer, source}.
std::vector<ProblemRecord> load_problems(const std::filesystem::path& path);
void save_problems(const std::filesystem::path& path, std::span<const ProblemRecord> problems);

// Line-delimited solution files: {problem_id, text, extracted, correct, sample_index}.
std::vector<SolutionRecord> load_solutions(const std::filesystem::path& path);
void save_solutions(const std::filesystem::path& path, std::span<const SolutionRecord> solutions);

}  // namespace critloop
