// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit status 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critloop/client.hpp"
#include "critloop/codec.hpp"
#include "critloop/dataset.hpp"
#include "critloop/errors.hpp"
#include "critloop/eval.hpp"
#include "critloop/parallel.hpp"
#include "critloop/records.hpp"
#include "critloop/reward.hpp"
#include "critloop/rng.hpp"
#include "critloop/scripted_server.hpp"
#include "support.hpp"

using namespace critloop;
using testsupport::RefinementScenario;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define ACCEPT(cond)                                                                   \
  do {                                                                                 \
    if (!(cond)) throw CheckFailure("check failed: " #cond);                           \
  } while (0)

#define ACCEPT_MSG(cond, msg)                                                          \
  do {                                                                                 \
    if (!(cond)) {                                                                     \
      std::ostringstream oss;                                                          \
      oss << "check failed: " #cond " (" << msg << ")";                                \
      throw CheckFailure(oss.str());                                                   \
    }                                                                                  \
  } while (0)

// ---------------------------------------------------------------------------
// shared fixtures
// ---------------------------------------------------------------------------

const FinalAnswer kTruth = make_final_answer("1");

SolutionRecord response_with_answer(const std::string& answer, int index) {
  SolutionRecord s;
  s.problem_id = "p";
  s.text = "attempt\n\\boxed{" + answer + "}";
  s.extracted = make_final_answer(answer);
  s.correct = math_equal(*s.extracted, kTruth);
  s.sample_index = index;
  return s;
}

std::vector<SolutionRecord> pool_from_mask(int mask, int size) {
  std::vector<SolutionRecord> pool;
  for (int i = 0; i < size; ++i)
    pool.push_back(response_with_answer((mask >> i) & 1 ? "1" : "2", i));
  return pool;
}

std::vector<Verdict> verdicts_from_mask(int mask, int size) {
  std::vector<Verdict> verdicts;
  for (int i = 0; i < size; ++i)
    verdicts.push_back((mask >> i) & 1 ? Verdict::correct : Verdict::incorrect);
  return verdicts;
}

// Independent majority oracle over answer strings (fixtures use two distinct
// integer answers, where string equality coincides with math_equal).
void enumerate_subsets_rec(int size, int n, int from, std::vector<int>& current,
                           std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == n) {
    out.push_back(current);
    return;
  }
  for (int i = from; i < size; ++i) {
    current.push_back(i);
    enumerate_subsets_rec(size, n, i + 1, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<int>> all_subsets(int size, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  enumerate_subsets_rec(size, n, 0, current, out);
  return out;
}

bool oracle_subset_correct(int answers_mask, const std::vector<bool>& accepted,
                           const std::vector<int>& subset, bool filtered) {
  std::vector<int> counted;
  if (filtered) {
    for (int idx : subset)
      if (accepted[static_cast<std::size_t>(idx)]) counted.push_back(idx);
  }
  if (counted.empty()) counted = subset;
  int votes_correct = 0, votes_wrong = 0;
  for (int idx : counted) ((answers_mask >> idx) & 1 ? votes_correct : votes_wrong) += 1;
  if (votes_correct == votes_wrong) {
    // tie: earliest counted vote wins
    return (answers_mask >> counted.front()) & 1;
  }
  return votes_correct > votes_wrong;
}

double oracle_expectation(int answers_mask, const std::vector<bool>& accepted, int size, int n,
                          bool filtered) {
  const auto subsets = all_subsets(size, n);
  double hits = 0.0;
  for (const auto& subset : subsets)
    hits += oracle_subset_correct(answers_mask, accepted, subset, filtered) ? 1.0 : 0.0;
  return hits / static_cast<double>(subsets.size());
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

void criterion_reward_truth_table() {
  for (int m = 1; m <= 4; ++m) {
    for (int c = 0; c <= 1; ++c) {
      for (int c_hat = 0; c_hat <= 1; ++c_hat) {
        for (int mask = 0; mask < (1 << m); ++mask) {
          std::vector<bool> outcomes;
          int bits = 0;
          for (int i = 0; i < m; ++i) {
            outcomes.push_back((mask >> i) & 1);
            bits += (mask >> i) & 1;
          }
          const double expect_j = (c == c_hat) ? 1.0 : 0.0;
          const double expect_r =
              (c == 0 && c_hat == 0) ? static_cast<double>(bits) / m : 0.0;
          ACCEPT(judgment_reward(c, c_hat) == expect_j);
          ACCEPT(refinement_reward(c, c_hat, outcomes) == expect_r);
        }
      }
    }
  }
}

void criterion_grpo_advantages() {
  SplitMix64 rng(20240601);
  const std::vector<int> sizes{2, 4, 8};
  for (int iter = 0; iter < 10000; ++iter) {
    const int size = sizes[iter % sizes.size()];
    std::vector<double> rewards;
    bool all_equal = true;
    for (int i = 0; i < size; ++i) {
      rewards.push_back(static_cast<double>(rng.below(17)) / 8.0);
      if (rewards[static_cast<std::size_t>(i)] != rewards[0]) all_equal = false;
    }
    const auto advantages = group_advantages(rewards, 1e-6);

    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= size;
    ACCEPT_MSG(std::abs(mean) <= 1e-9, "mean " << mean);

    std::vector<double> shifted = rewards;
    for (double& r : shifted) r += 3.25;
    const auto shifted_adv = group_advantages(shifted, 1e-6);
    for (int i = 0; i < size; ++i)
      ACCEPT(std::abs(advantages[static_cast<std::size_t>(i)] -
                      shifted_adv[static_cast<std::size_t>(i)]) <= 1e-9);

    if (all_equal)
      for (double a : advantages) ACCEPT(a == 0.0);
  }

  for (int size : sizes) {
    const auto zeros = group_advantages(std::vector<double>(size, 0.75), 1e-6);
    for (double a : zeros) ACCEPT(a == 0.0);
  }

  const auto fixture = group_advantages(std::vector<double>{1.0, 0.0, 0.0, 0.0}, 1e-6);
  ACCEPT(std::abs(fixture[0] - 1.732) <= 1e-3);
  for (int i = 1; i < 4; ++i)
    ACCEPT(std::abs(fixture[static_cast<std::size_t>(i)] + 0.577) <= 1e-3);
}

void criterion_lambda_schedule() {
  RewardConfig config;  // stage defaults 600 / 300
  ACCEPT(lambda_schedule(0, config) == 0.0);
  ACCEPT(lambda_schedule(599, config) == 0.0);
  ACCEPT(lambda_schedule(600, config) == 1.0);
  ACCEPT(lambda_schedule(899, config) == 1.0);
  ACCEPT(!training_complete(899, config));
  ACCEPT(training_complete(900, config));
  bool threw = false;
  try {
    lambda_schedule(900, config);
  } catch (const ContractViolation&) {
    threw = true;
  }
  ACCEPT(threw);

  config.lambda = 0.7;
  ACCEPT(lambda_schedule(600, config) == 0.7);
  ACCEPT(lambda_schedule(899, config) == 0.7);
}

void criterion_estimator_oracle_equivalence() {
  const int trials = 20000;
  const double tolerance = 3.0 * std::sqrt(0.25 / trials);
  int configs = 0;
  for (int size = 1; size <= 6; ++size) {
    for (int answers_mask = 0; answers_mask < (1 << size); ++answers_mask) {
      const auto pool = pool_from_mask(answers_mask, size);
      for (int n = 1; n <= std::min(size, 3); ++n) {
        // plain mode ignores verdicts entirely
        {
          const std::vector<bool> accept_none(static_cast<std::size_t>(size), false);
          const double expect = oracle_expectation(answers_mask, accept_none, size, n, false);
          const double est =
              trial_estimate(pool, verdicts_from_mask(0, size), kTruth, n, trials,
                             0xACCE07ULL + static_cast<std::uint64_t>(configs),
                             MajorityMode::plain);
          ACCEPT_MSG(std::abs(est - expect) <= tolerance,
                     "plain size " << size << " answers " << answers_mask << " n " << n
                                   << " est " << est << " expect " << expect);
          ++configs;
        }
        for (int verdict_mask = 0; verdict_mask < (1 << size); ++verdict_mask) {
          std::vector<bool> accepted;
          for (int i = 0; i < size; ++i) accepted.push_back((verdict_mask >> i) & 1);
          const double expect = oracle_expectation(answers_mask, accepted, size, n, true);
          const double est =
              trial_estimate(pool, verdicts_from_mask(verdict_mask, size), kTruth, n, trials,
                             0xACCE07ULL + static_cast<std::uint64_t>(configs),
                             MajorityMode::filtered);
          ACCEPT_MSG(std::abs(est - expect) <= tolerance,
                     "filtered size " << size << " answers " << answers_mask << " verdicts "
                                      << verdict_mask << " n " << n << " est " << est
                                      << " expect " << expect);
          ++configs;
        }
      }
    }
  }
}

void criterion_accept_all_identity_and_dominance() {
  // identity: with accept-all verdicts the two modes share every draw
  SplitMix64 rng(515151);
  for (int iter = 0; iter < 50; ++iter) {
    const int size = 2 + static_cast<int>(rng.below(9));  // up to 10
    const int mask = static_cast<int>(rng.below(1ULL << size));
    const auto pool = pool_from_mask(mask, size);
    const std::vector<Verdict> verdicts(static_cast<std::size_t>(size), Verdict::correct);
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
    const std::uint64_t seed = rng.next();
    const double plain = trial_estimate(pool, verdicts, kTruth, n, 2000, seed,
                                        MajorityMode::plain);
    const double filtered = trial_estimate(pool, verdicts, kTruth, n, 2000, seed,
                                           MajorityMode::filtered);
    ACCEPT_MSG(plain == filtered, "size " << size << " mask " << mask << " n " << n);
  }

  // dominance: ground-truth verdicts, every pool over {correct, wrong} up to
  // size 8, n up to 4; exhaustive subset accuracy via the library majority op
  for (int size = 1; size <= 8; ++size) {
    for (int mask = 0; mask < (1 << size); ++mask) {
      const auto pool = pool_from_mask(mask, size);
      std::vector<Verdict> truth_verdicts;
      for (int i = 0; i < size; ++i)
        truth_verdicts.push_back((mask >> i) & 1 ? Verdict::correct : Verdict::incorrect);
      const std::vector<Verdict> accept_all(static_cast<std::size_t>(size), Verdict::correct);
      for (int n = 1; n <= std::min(size, 4); ++n) {
        double filtered_hits = 0.0, plain_hits = 0.0;
        int subsets = 0;
        for (const auto& subset : all_subsets(size, n)) {
          std::vector<SolutionRecord> sample;
          std::vector<Verdict> sample_truth, sample_all;
          for (int idx : subset) {
            sample.push_back(pool[static_cast<std::size_t>(idx)]);
            sample_truth.push_back(truth_verdicts[static_cast<std::size_t>(idx)]);
            sample_all.push_back(Verdict::correct);
          }
          const bool has_correct = std::any_of(
              sample.begin(), sample.end(), [](const SolutionRecord& r) { return r.correct; });
          const bool filtered_correct =
              math_equal(critic_filtered_majority(sample, sample_truth), kTruth);
          if (has_correct)
            ACCEPT_MSG(filtered_correct, "oracle critic missed mask " << mask << " n " << n);
          filtered_hits += filtered_correct ? 1.0 : 0.0;
          plain_hits +=
              math_equal(critic_filtered_majority(sample, sample_all), kTruth) ? 1.0 : 0.0;
          ++subsets;
        }
        ACCEPT_MSG(filtered_hits >= plain_hits,
                   "dominance broken at mask " << mask << " size " << size << " n " << n);
      }
    }
  }
}

void criterion_end_to_end_refinement() {
  namespace fs = std::filesystem;
  using nlohmann::json;
  const fs::path dir = fs::temp_directory_path() / "critloop-acceptance-e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);

  RefinementScenario sc = testsupport::build_refinement_scenario();
  ScriptedServer server(sc.fixtures, testsupport::scripted_roles());
  server.start();

  json cfg = testsupport::scripted_config(server.base_url());
  cfg["reward"] = {{"lambda", 1.0}, {"m", 2}, {"group_size", 2},
                   {"stage1_steps", 600}, {"stage2_steps", 300}};
  cfg["rl"] = {{"inputs_per_step", 16}};
  cfg["eval"] = {{"benchmark", "fixture8"}, {"pool_size", 2}, {"trials", 64},
                 {"n_values", {2}}};
  testsupport::write_file(dir / "config.json", cfg.dump(2));
  testsupport::write_scenario_corpus(sc, dir);

  auto pools = testsupport::run_cli("build-pools --config config.json", dir);
  ACCEPT_MSG(pools.exit_code == 0, pools.output);
  auto evaluate = testsupport::run_cli("evaluate --config config.json", dir);
  ACCEPT_MSG(evaluate.exit_code == 0, evaluate.output);

  // initial pass@1 is 2/8; scripted refinements fix 4 of the 6 wrong
  const auto report =
      testsupport::slurp_file(dir / "data" / "reports" / "eval-fixture8.jsonl");
  std::istringstream lines(report);
  std::string line;
  std::getline(lines, line);
  const json pass_metric = json::parse(line);
  ACCEPT(pass_metric["metric"] == "pass_r@1");
  ACCEPT_MSG(pass_metric["value"].get<double>() == 0.75, "got " << pass_metric["value"]);

  auto rl = testsupport::run_cli("rl-step --config config.json --step 600", dir);
  ACCEPT_MSG(rl.exit_code == 0, rl.output);
  const auto batch =
      testsupport::slurp_file(dir / "data" / "batches" / "batch-000600.jsonl");
  std::map<std::string, std::map<int, double>> rewards;
  std::istringstream batch_lines(batch);
  int rows = 0;
  while (std::getline(batch_lines, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    rewards[row["group_id"]][row["critique_index"].get<int>()] = row["reward"].get<double>();
    ++rows;
  }
  ACCEPT_MSG(rows == 32, "rows " << rows);
  for (int i = 1; i <= 8; ++i) {
    const auto& ok_group = rewards.at("p" + std::to_string(i) + "#0");
    ACCEPT(ok_group.at(0) == 1.0);
    ACCEPT(ok_group.at(1) == 1.0);
  }
  for (int i = 3; i <= 8; ++i) {
    const auto& outcomes = sc.refinement_outcomes.at("p" + std::to_string(i));
    const auto& group = rewards.at("p" + std::to_string(i) + "#1");
    for (int which = 0; which < 2; ++which) {
      const double mean =
          (outcomes[static_cast<std::size_t>(which)][0] ? 0.5 : 0.0) +
          (outcomes[static_cast<std::size_t>(which)][1] ? 0.5 : 0.0);
      ACCEPT_MSG(group.at(which) == 1.0 + mean,
                 "p" << i << " critique " << which << " got " << group.at(which));
    }
  }
  fs::remove_all(dir);
}

void criterion_processbench_fixture() {
  // 10 hand-authored cases: a = 0.8 over the error-free half, b = 0.6 over
  // the erroneous half (one miss is an abstain).
  struct Fixture {
    int label;
    std::string reply;
  };
  const std::vector<Fixture> fixtures{
      {-1, "clean \\boxed{-1}"},     {-1, "clean \\boxed{-1}"},
      {-1, "clean \\boxed{-1}"},     {-1, "clean \\boxed{-1}"},
      {-1, "suspicious \\boxed{3}"},  // miss
      {2, "error at \\boxed{2}"},    {0, "error at \\boxed{0}"},
      {4, "error at \\boxed{4}"},    {1, "error at \\boxed{5}"},  // miss
      {3, "cannot decide"},           // abstain, counted as an error
  };
  std::vector<ProcessCase> cases;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    ProcessCase c;
    c.problem_id = "case-" + std::to_string(i);
    c.problem = "problem";
    c.paragraphs = std::vector<std::string>(6, "step");
    c.label = fixtures[i].label;
    c.predicted = extract_error_step(fixtures[i].reply, 6);
    cases.push_back(std::move(c));
  }
  const ProcessScore score = processbench_score(cases);
  ACCEPT(std::abs(score.acc_correct - 0.8) <= 1e-12);
  ACCEPT(std::abs(score.acc_incorrect - 0.6) <= 1e-12);
  ACCEPT_MSG(std::abs(score.f1 - 0.685714) <= 1e-6, "f1 " << score.f1);
}

void criterion_sft_screening_fixture() {
  const FinalAnswer truth = make_final_answer("24");
  struct Fixture {
    std::string critique;
    bool solution_correct;
  };
  const std::vector<Fixture> fixtures{
      // six clean samples
      {"checks out.\n**Correctness**: Correct", true},
      {"valid derivation.\n**Correctness**: Correct", true},
      {"sound.\n**Correctness**: Correct", true},
      {"step 2 is off.\n**Correctness**: Incorrect\n**Comment**: redo the expansion", false},
      {"bad bound.\n**Correctness**: Incorrect\n**Comment**: tighten the inequality", false},
      {"arith slip.\n**Correctness**: Incorrect\n**Comment**: recheck the product", false},
      // two erroneous judgments
      {"fine.\n**Correctness**: Correct", false},
      {"broken.\n**Correctness**: Incorrect\n**Comment**: rework step 1", true},
      // one answer leakage
      {"wrong.\n**Correctness**: Incorrect\n**Comment**: the result must be 24", false},
      // one missing verdict
      {"interesting approach, hard to say", false},
  };
  int accepted = 0;
  std::map<std::string, int> histogram;
  for (const auto& fixture : fixtures) {
    const RawScreenResult result =
        screen_raw_critique(fixture.critique, fixture.solution_correct, truth);
    if (result.screen.accepted)
      ++accepted;
    else
      ++histogram[std::string(to_string(result.screen.reason))];
  }
  ACCEPT_MSG(accepted == 6, "accepted " << accepted);
  ACCEPT(histogram["erroneous_judgment"] == 2);
  ACCEPT(histogram["answer_leakage"] == 1);
  ACCEPT(histogram["instruction_violation"] == 1);
  ACCEPT(histogram.size() == 3);
}

void criterion_curation_fixture() {
  // 50 problems: 42 unique bases, 5 exact duplicates, 3 near-duplicate
  // embeddings; of the 42 bases, 4 are judge-dropped and 6 difficulty-dropped.
  std::vector<ProblemRecord> corpus;
  std::map<std::string, std::string> judge_replies;
  std::map<std::string, int> pass_counts;

  auto unit_vector = [](int axis, double second_axis_weight = 0.0,
                        int second_axis = 0) -> std::vector<double> {
    std::vector<double> v(50, 0.0);
    v[static_cast<std::size_t>(axis)] = 1.0;
    if (second_axis_weight != 0.0) {
      v[static_cast<std::size_t>(axis)] = std::sqrt(1.0 - second_axis_weight *
                                                              second_axis_weight);
      v[static_cast<std::size_t>(second_axis)] = second_axis_weight;
    }
    return v;
  };

  for (int i = 0; i < 42; ++i) {
    ProblemRecord p;
    p.id = (i < 10 ? "u0" : "u") + std::to_string(i);
    p.statement = "Base problem number " + std::to_string(i) + ".";
    p.answer = make_final_answer("3");
    p.embedding = unit_vector(i);
    corpus.push_back(p);
    judge_replies[p.id] = "\\boxed{SOLVABLE}";
    pass_counts[p.id] = 3;  // mixed outcomes by default
  }
  judge_replies["u08"] = "analysis \\boxed{PROOF}";
  judge_replies["u09"] = "\\boxed{UNSOLVABLE}";
  judge_replies["u10"] = "\\boxed{MULTIPLE_CHOICE}";
  judge_replies["u11"] = "\\boxed{PROOF}";
  pass_counts["u12"] = 8;
  pass_counts["u13"] = 8;
  pass_counts["u14"] = 0;
  pass_counts["u15"] = 0;
  pass_counts["u16"] = 8;
  pass_counts["u17"] = 0;

  for (int d = 0; d < 5; ++d) {
    ProblemRecord p = corpus[static_cast<std::size_t>(d)];
    p.id = "x" + std::to_string(d);
    p.statement = "  BASE  problem number " + std::to_string(d) + ". ";  // same canonically
    p.embedding = unit_vector(48);
    corpus.push_back(p);
  }
  for (int d = 0; d < 3; ++d) {
    ProblemRecord p;
    p.id = "n" + std::to_string(d);
    p.statement = "Slightly reworded base problem " + std::to_string(5 + d) + ".";
    p.answer = make_final_answer("3");
    // cosine with base axis (5+d): sqrt(1 - 0.04) ~ 0.98 > 0.95
    p.embedding = unit_vector(5 + d, 0.2, 49);
    corpus.push_back(p);
  }
  ACCEPT(corpus.size() == 50);

  const auto deduped = dedup(corpus, 0.95);
  ACCEPT_MSG(deduped.size() == 42, "after dedup " << deduped.size());
  const auto twice = dedup(deduped, 0.95);
  ACCEPT(twice.size() == deduped.size());
  for (std::size_t i = 0; i < twice.size(); ++i) ACCEPT(twice[i].id == deduped[i].id);

  std::vector<ProblemRecord> after_judge;
  for (const auto& p : deduped) {
    if (judge_screen(p, judge_replies.at(p.id)) == JudgeVerdict::keep) after_judge.push_back(p);
  }
  ACCEPT_MSG(after_judge.size() == 38, "after judge " << after_judge.size());

  std::vector<std::string> survivors;
  for (const auto& p : after_judge) {
    if (difficulty_balance(pass_counts.at(p.id), 8) == DifficultyDecision::keep)
      survivors.push_back(p.id);
  }
  std::vector<std::string> expected;
  for (int i = 0; i < 42; ++i) {
    if (i >= 8 && i <= 17) continue;  // judge and difficulty drops
    expected.push_back((i < 10 ? "u0" : "u") + std::to_string(i));
  }
  ACCEPT_MSG(survivors.size() == 32, "survivors " << survivors.size());
  ACCEPT(survivors == expected);
}

void criterion_concurrency_bound() {
  for (int limit : {1, 4, 16}) {
    ScriptedServer::Options options;
    options.response_delay_ms = 1;
    options.threads = 64;
    ScriptedServer server(FixtureStore{}, {{"m", Role::policy}}, options);
    server.start();

    Endpoint ep;
    ep.base_url = server.base_url();
    ep.model_name = "m";
    ep.role = Role::policy;
    ep.max_concurrency = limit;
    ep.retry_budget = 1;
    RetryPolicy fast;
    fast.base_delay = std::chrono::milliseconds(1);
    InferenceClient client(ep, fast);

    SamplingParams params;
    run_parallel(32, 1000, [&](std::size_t i) {
      std::vector<Message> messages{{"user", "load " + std::to_string(i)}};
      client.sample_completions(messages, params);
    });
    ACCEPT_MSG(server.total_requests() == 1000, "requests " << server.total_requests());
    ACCEPT_MSG(server.max_in_flight() <= limit,
               "k=" << limit << " observed " << server.max_in_flight());
  }
}

struct Criterion {
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1 reward truth table (m=1..4, zero tolerance)", criterion_reward_truth_table},
      {"2 GRPO advantage properties (10k random groups)", criterion_grpo_advantages},
      {"3 lambda schedule exactness and halt at 900", criterion_lambda_schedule},
      {"4 estimator oracle equivalence (pools<=6, n<=3, 20k trials)",
       criterion_estimator_oracle_equivalence},
      {"5 accept-all identity and oracle dominance (pools<=8, n<=4)",
       criterion_accept_all_identity_and_dominance},
      {"6 end-to-end refinement fixture (Pass_r@1 = 0.75, rl-step rewards)",
       criterion_end_to_end_refinement},
      {"7 process scoring fixture (f1 = 0.685714 +- 1e-6)", criterion_processbench_fixture},
      {"8 SFT screening fixture (6 accepted, exact histogram)",
       criterion_sft_screening_fixture},
      {"9 curation pipeline fixture (50 -> 32 survivors, idempotent dedup)",
       criterion_curation_fixture},
      {"10 concurrency bound (1000 requests at k in {1,4,16})",
       criterion_concurrency_bound},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (error.empty()) {
      std::printf("[PASS] criterion %s (%.2fs)\n", criterion.name, seconds);
    } else {
      std::printf("[FAIL] criterion %s (%.2fs): %s\n", criterion.name, seconds,
                  error.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
