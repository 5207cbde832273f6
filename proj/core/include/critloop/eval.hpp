#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critloop/codec.hpp"
#include "critloop/records.hpp"

namespace critloop {

// One critique-then-refine round for a single problem. A refined solution is
// present exactly when the critic judged the initial solution incorrect.
struct Episode {
  std::string problem_id;
  SolutionRecord initial;
  Verdict verdict = Verdict::correct;
  std::optional<SolutionRecord> refined;
};

// Fraction of episodes whose final answer (refined when present, else
// initial) is correct.
double pass_r_at_1(std::span<const Episode> episodes);

// Majority vote over the solutions the critic accepted; answers are grouped
// by math_equal equivalence. Ties go to the earliest first occurrence among
// the counted votes. When every solution is filtered out, falls back to a
// plain majority over the whole sample.
FinalAnswer critic_filtered_majority(std::span<const SolutionRecord> sample,
                                     std::span<const Verdict> verdicts);

enum class MajorityMode { plain, filtered };

// Monte Carlo Maj@N / Maj_c@N over a frozen response pool: each trial draws n
// distinct responses (uniform, without replacement), applies the majority
// rule, and scores the chosen answer against the ground truth. Deterministic
// for a fixed seed. When the number of distinct subsets is small the trials
// cycle through a seeded permutation of the full enumeration, which keeps the
// estimate within (subsets - 1)/trials of the exhaustive expectation.
double trial_estimate(std::span<const SolutionRecord> pool, std::span<const Verdict> verdicts,
                      const FinalAnswer& ground_truth, int n, int trials, std::uint64_t seed,
                      MajorityMode mode);

// Majority vote over repeated critiques of one solution; an exact tie keeps
// the solution (verdict correct).
Verdict aggregate_critiques(std::span<const Verdict> verdicts);

// Parses the extractor's boxed step index. Valid range is -1 (no error) to
// paragraph_count - 1; anything else, or an unparseable box, abstains.
std::optional<int> extract_error_step(std::string_view extractor_reply, int paragraph_count);

// A step-level error localization case: label is the earliest erroneous
// paragraph index, -1 when the solution is error-free.
struct ProcessCase {
  std::string problem_id;
  std::string problem;
  std::vector<std::string> paragraphs;
  int label = -1;
  std::optional<int> predicted;  // nullopt = abstain
};

struct ProcessScore {
  double acc_correct = 0.0;    // label == -1 cases predicted -1
  double acc_incorrect = 0.0;  // label >= 0 cases predicted exactly
  double f1 = 0.0;             // harmonic mean, 0 when either accuracy is 0
};

// Abstains count as errors on both sides.
ProcessScore processbench_score(std::span<const ProcessCase> cases);

std::vector<ProcessCase> load_process_cases(const std::filesystem::path& path);

// One evaluation report line: {benchmark, metric, n, trials, seed, value}.
struct MetricRecord {
  std::string benchmark;
  std::string metric;
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
};

void save_metrics(const std::filesystem::path& path, std::span<const MetricRecord> metrics);
std::string format_metric_table(std::span<const MetricRecord> metrics);

}  // namespace critloop
