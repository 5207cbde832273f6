#include "critloop/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "critloop/errors.hpp"
#include "critloop/rng.hpp"

namespace critloop {
namespace {

// Answers of pool members, with missing extractions mapped to the empty
// answer so they still form an equivalence class.
FinalAnswer answer_of(const SolutionRecord& record) {
  return record.extracted ? *record.extracted : FinalAnswer{};
}

// Assigns each record an equivalence-class id by scanning for the first
// earlier representative it is math_equal to.
std::vector<int> answer_classes(std::span<const SolutionRecord> pool,
                                std::vector<FinalAnswer>& representatives) {
  std::vector<int> classes(pool.size(), -1);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const FinalAnswer answer = answer_of(pool[i]);
    for (std::size_t k = 0; k < representatives.size(); ++k) {
      if (math_equal(answer, representatives[k])) {
        classes[i] = static_cast<int>(k);
        break;
      }
    }
    if (classes[i] < 0) {
      classes[i] = static_cast<int>(representatives.size());
      representatives.push_back(answer);
    }
  }
  return classes;
}

// Majority over the counted votes (survivors, or everyone on fallback):
// largest class wins, ties go to the class appearing first among the votes.
int majority_class(std::span<const std::size_t> subset, std::span<const int> classes,
                   std::span<const Verdict> verdicts, MajorityMode mode, int class_count) {
  std::vector<int> votes(static_cast<std::size_t>(class_count), 0);
  std::vector<std::size_t> counted;
  counted.reserve(subset.size());
  if (mode == MajorityMode::filtered) {
    for (std::size_t idx : subset)
      if (verdicts[idx] == Verdict::correct) counted.push_back(idx);
  }
  if (counted.empty())
    counted.assign(subset.begin(), subset.end());  // plain mode or all filtered
  for (std::size_t idx : counted) ++votes[static_cast<std::size_t>(classes[idx])];
  int best = -1;
  for (std::size_t idx : counted) {
    const int cls = classes[idx];
    if (best < 0 || votes[static_cast<std::size_t>(cls)] > votes[static_cast<std::size_t>(best)])
      best = cls;
  }
  return best;
}

// Number of n-subsets, clamped at `limit` + 1 to avoid overflow.
std::size_t subset_count_clamped(std::size_t pool, std::size_t n, std::size_t limit) {
  unsigned __int128 count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count = count * (pool - i) / (i + 1);
    if (count > limit) return limit + 1;
  }
  return static_cast<std::size_t>(count);
}

std::vector<std::vector<std::size_t>> enumerate_subsets(std::size_t pool, std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current(n);
  std::iota(current.begin(), current.end(), std::size_t{0});
  for (;;) {
    out.push_back(current);
    // advance to the next combination in lexicographic order
    std::size_t i = n;
    bool advanced = false;
    while (i-- > 0) {
      if (current[i] != i + pool - n) {
        ++current[i];
        for (std::size_t j = i + 1; j < n; ++j) current[j] = current[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return out;
}

constexpr std::size_t kSubsetEnumerationLimit = 4096;

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

double pass_r_at_1(std::span<const Episode> episodes) {
  if (episodes.empty()) throw ConfigError("pass_r_at_1: no episodes");
  double passed = 0.0;
  for (const auto& ep : episodes) {
    const bool has_refined = ep.refined.has_value();
    if (has_refined != (ep.verdict == Verdict::incorrect))
      throw ContractViolation("episode '" + ep.problem_id +
                              "': refined solution must be present exactly when the verdict "
                              "is incorrect");
    const SolutionRecord& final_record = ep.refined ? *ep.refined : ep.initial;
    passed += final_record.correct ? 1.0 : 0.0;
  }
  return passed / static_cast<double>(episodes.size());
}

FinalAnswer critic_filtered_majority(std::span<const SolutionRecord> sample,
                                     std::span<const Verdict> verdicts) {
  if (sample.empty() || sample.size() != verdicts.size())
    throw ContractViolation("critic_filtered_majority: sample and verdicts must align");
  std::vector<FinalAnswer> representatives;
  const std::vector<int> classes = answer_classes(sample, representatives);
  std::vector<std::size_t> all(sample.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const int winner = majority_class(all, classes, verdicts, MajorityMode::filtered,
                                    static_cast<int>(representatives.size()));
  return representatives[static_cast<std::size_t>(winner)];
}

double trial_estimate(std::span<const SolutionRecord> pool, std::span<const Verdict> verdicts,
                      const FinalAnswer& ground_truth, int n, int trials, std::uint64_t seed,
                      MajorityMode mode) {
  if (pool.empty() || pool.size() != verdicts.size())
    throw ContractViolation("trial_estimate: pool and verdicts must align");
  if (n < 1 || static_cast<std::size_t>(n) > pool.size())
    throw ContractViolation("trial_estimate: n must lie in [1, pool size]");
  if (trials < 1) throw ContractViolation("trial_estimate: trials must be >= 1");

  std::vector<FinalAnswer> representatives;
  const std::vector<int> classes = answer_classes(pool, representatives);
  std::vector<bool> class_correct;
  class_correct.reserve(representatives.size());
  for (const auto& rep : representatives)
    class_correct.push_back(math_equal(rep, ground_truth));

  const auto score = [&](std::span<const std::size_t> subset) {
    const int winner = majority_class(subset, classes, verdicts, mode,
                                      static_cast<int>(representatives.size()));
    return class_correct[static_cast<std::size_t>(winner)] ? 1.0 : 0.0;
  };

  const std::size_t count = subset_count_clamped(pool.size(), static_cast<std::size_t>(n),
                                                 kSubsetEnumerationLimit);
  double sum = 0.0;
  if (count <= kSubsetEnumerationLimit) {
    // Small state space: cycle trials through a seeded permutation of the
    // full enumeration. Each draw is still uniform; the estimate lands
    // within (count - 1)/trials of the exhaustive expectation.
    const auto subsets = enumerate_subsets(pool.size(), static_cast<std::size_t>(n));
    std::vector<double> subset_scores;
    subset_scores.reserve(subsets.size());
    for (const auto& subset : subsets) subset_scores.push_back(score(subset));
    std::vector<std::size_t> order(subsets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 perm_rng = derive_rng(seed, 0x50b5e75ULL);
    shuffle(perm_rng, order);
    for (int t = 0; t < trials; ++t)
      sum += subset_scores[order[static_cast<std::size_t>(t) % order.size()]];
  } else {
    for (int t = 0; t < trials; ++t) {
      SplitMix64 rng = derive_rng(seed, static_cast<std::uint64_t>(t));
      const auto subset = sample_without_replacement(rng, pool.size(),
                                                     static_cast<std::size_t>(n));
      sum += score(subset);
    }
  }
  return sum / static_cast<double>(trials);
}

Verdict aggregate_critiques(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) throw ConfigError("aggregate_critiques: no verdicts");
  std::size_t incorrect = 0;
  for (Verdict v : verdicts)
    if (v == Verdict::incorrect) ++incorrect;
  // exact tie keeps the solution
  return incorrect * 2 > verdicts.size() ? Verdict::incorrect : Verdict::correct;
}

std::optional<int> extract_error_step(std::string_view extractor_reply, int paragraph_count) {
  const auto boxed = extract_boxed(extractor_reply);
  if (!boxed) return std::nullopt;
  const std::string_view content = trim_view(boxed->canonical);
  if (content.empty()) return std::nullopt;
  std::size_t p = 0;
  bool negative = false;
  if (content[p] == '-' || content[p] == '+') {
    negative = content[p] == '-';
    ++p;
  }
  if (p == content.size()) return std::nullopt;
  long value = 0;
  for (; p < content.size(); ++p) {
    if (!std::isdigit(static_cast<unsigned char>(content[p]))) return std::nullopt;
    value = value * 10 + (content[p] - '0');
    if (value > 1'000'000) return std::nullopt;
  }
  if (negative) value = -value;
  if (value < -1 || value >= paragraph_count) return std::nullopt;
  return static_cast<int>(value);
}

ProcessScore processbench_score(std::span<const ProcessCase> cases) {
  std::size_t correct_total = 0, correct_hits = 0;
  std::size_t incorrect_total = 0, incorrect_hits = 0;
  for (const auto& c : cases) {
    if (c.label < -1 || c.label >= static_cast<int>(c.paragraphs.size()))
      throw ContractViolation("process case '" + c.problem_id + "' has an out-of-range label");
    if (c.label == -1) {
      ++correct_total;
      if (c.predicted && *c.predicted == -1) ++correct_hits;
    } else {
      ++incorrect_total;
      if (c.predicted && *c.predicted == c.label) ++incorrect_hits;
    }
  }
  if (correct_total == 0)
    throw ConfigError("processbench_score: no cases with label -1 (error-free subset is empty)");
  if (incorrect_total == 0)
    throw ConfigError("processbench_score: no cases with label >= 0 (erroneous subset is empty)");
  ProcessScore score;
  score.acc_correct = static_cast<double>(correct_hits) / static_cast<double>(correct_total);
  score.acc_incorrect =
      static_cast<double>(incorrect_hits) / static_cast<double>(incorrect_total);
  score.f1 = (score.acc_correct == 0.0 || score.acc_incorrect == 0.0)
                 ? 0.0
                 : 2.0 * score.acc_correct * score.acc_incorrect /
                       (score.acc_correct + score.acc_incorrect);
  return score;
}

std::vector<ProcessCase> load_process_cases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<ProcessCase> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("problem") ||
        !j.contains("paragraphs") || !j.at("paragraphs").is_array() || !j.contains("label"))
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected {problem, paragraphs, label}");
    ProcessCase c;
    c.problem_id = j.value("id", "case-" + std::to_string(lineno));
    c.problem = j.at("problem").get<std::string>();
    for (const auto& p : j.at("paragraphs")) c.paragraphs.push_back(p.get<std::string>());
    c.label = j.at("label").get<int>();
    out.push_back(std::move(c));
  }
  return out;
}

void save_metrics(const std::filesystem::path& path, std::span<const MetricRecord> metrics) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& m : metrics) {
    nlohmann::json j;
    j["benchmark"] = m.benchmark;
    j["metric"] = m.metric;
    j["n"] = m.n;
    j["trials"] = m.trials;
    j["seed"] = m.seed;
    j["value"] = m.value;
    out << j.dump() << '\n';
  }
}

std::string format_metric_table(std::span<const MetricRecord> metrics) {
  std::ostringstream out;
  out << "benchmark            metric           n     trials  value\n";
  out << "-------------------  ---------------  ----  ------  --------\n";
  for (const auto& m : metrics) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-19s  %-15s  %4d  %6d  %.6f\n", m.benchmark.c_str(),
                  m.metric.c_str(), m.n, m.trials, m.value);
    out << line;
  }
  return out.str();
}

}  // namespace critloop
