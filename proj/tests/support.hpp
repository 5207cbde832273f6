#pragma once

// Shared helpers for integration and acceptance tests: scripted-server
// fixture scenarios, config files and CLI invocation.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critloop/codec.hpp"
#include "critloop/records.hpp"
#include "critloop/scripted_server.hpp"

namespace testsupport {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << content;
}

inline std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Config with every role pointing at the scripted server.
inline nlohmann::json scripted_config(const std::string& base_url) {
  nlohmann::json cfg;
  cfg["seed"] = 42;
  cfg["endpoints"] = nlohmann::json::array();
  for (const char* role : {"policy", "critic", "judge", "extractor", "embeddings"}) {
    cfg["endpoints"].push_back({{"role", role},
                                {"base_url", base_url},
                                {"model", std::string("scripted-") + role},
                                {"max_concurrency", 8},
                                {"retry_budget", 2}});
  }
  cfg["paths"] = {{"corpus", "data/corpus"},
                  {"pools", "data/pools"},
                  {"batches", "data/batches"},
                  {"reports", "data/reports"}};
  return cfg;
}

inline std::map<std::string, critloop::Role> scripted_roles() {
  return {{"scripted-policy", critloop::Role::policy},
          {"scripted-critic", critloop::Role::critic},
          {"scripted-judge", critloop::Role::judge},
          {"scripted-extractor", critloop::Role::extractor},
          {"scripted-embeddings", critloop::Role::embeddings}};
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

inline CliResult run_cli(const std::string& args, const std::filesystem::path& workdir,
                         const std::string& env = {}) {
  const std::string command = "cd '" + workdir.string() + "' && " +
                              (env.empty() ? "" : env + " ") + "'" CRITLOOP_CLI_PATH "' " +
                              args + " 2>&1";
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer;
  while (std::size_t got = fread(buffer.data(), 1, buffer.size(), pipe))
    result.output.append(buffer.data(), got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// ---------------------------------------------------------------------------
// The eight-problem refinement scenario.
//
// Pools hold two responses per problem: response 0 is the initial solution
// (correct for p1 and p2 only) and response 1 is a correct solution. The
// critic judges every response correctly; refinements driven by the first
// critique comment fix p3..p6 and fail on p7 and p8, so Pass_r@1 is 6/8.
// For rl-step the probe solutions give one correct and one incorrect input
// per problem (16 inputs, groups of 2 critiques, 2 refinements each).
// ---------------------------------------------------------------------------
struct RefinementScenario {
  std::vector<critloop::ProblemRecord> problems;
  critloop::FixtureStore fixtures;
  // per problem: refinement outcomes for comment A and comment B
  std::map<std::string, std::array<std::array<bool, 2>, 2>> refinement_outcomes;

  static std::string answer_for(int i) { return std::to_string(100 + i); }
  static std::string statement_for(int i) {
    return "Problem " + std::to_string(i) + ": compute the quantity.";
  }
  static std::string correct_text(int i) {
    return "working it out, the result is \\boxed{" + answer_for(i) + "}";
  }
  static std::string wrong_text(int i) {
    return "a slip in step 2 gives \\boxed{9" + std::to_string(i) + "9}";
  }
  static std::string comment(int i, char which) {
    return std::string("rework the sum in step 2 (hint ") + which + "-" + std::to_string(i) +
           ")";
  }
};

inline RefinementScenario build_refinement_scenario() {
  using critloop::Role;
  RefinementScenario sc;

  // outcomes[comment A][rollout], outcomes[comment B][rollout]
  const std::map<int, std::array<std::array<bool, 2>, 2>> plan{
      {3, {{{true, true}, {true, false}}}},   {4, {{{true, false}, {false, false}}}},
      {5, {{{true, true}, {true, true}}}},    {6, {{{true, false}, {true, true}}}},
      {7, {{{false, false}, {false, true}}}}, {8, {{{false, false}, {false, false}}}},
  };

  for (int i = 1; i <= 8; ++i) {
    critloop::ProblemRecord p;
    p.id = "p" + std::to_string(i);
    p.statement = RefinementScenario::statement_for(i);
    p.answer = critloop::make_final_answer(RefinementScenario::answer_for(i));
    p.source = "fixture";
    sc.problems.push_back(p);

    const std::string ok_text = RefinementScenario::correct_text(i);
    const std::string bad_text = RefinementScenario::wrong_text(i);
    const std::string y0 = i <= 2 ? ok_text : bad_text;

    // build-pools: policy answers the problem statement with [y0, correct]
    sc.fixtures.add(Role::policy, p.statement, 0, y0);
    sc.fixtures.add(Role::policy, p.statement, 1, ok_text);

    // critic fixtures for both solution texts, two critiques each
    const std::string prompt_ok = critloop::render_critique_prompt(p.statement, ok_text);
    sc.fixtures.add(Role::critic, prompt_ok, 0, "checked each step.\n**Correctness**: Correct");
    sc.fixtures.add(Role::critic, prompt_ok, 1, "verified once more.\n**Correctness**: Correct");

    const std::string prompt_bad = critloop::render_critique_prompt(p.statement, bad_text);
    const std::string comment_a = RefinementScenario::comment(i, 'A');
    const std::string comment_b = RefinementScenario::comment(i, 'B');
    sc.fixtures.add(Role::critic, prompt_bad, 0,
                    "step 2 drops a term.\n**Correctness**: Incorrect\n**Comment**: " +
                        comment_a);
    sc.fixtures.add(Role::critic, prompt_bad, 1,
                    "the sum is off.\n**Correctness**: Incorrect\n**Comment**: " + comment_b);

    // refinement fixtures for both comments
    if (i >= 3) {
      const auto& outcomes = plan.at(i);
      sc.refinement_outcomes[p.id] = outcomes;
      const std::array<std::string, 2> comments{comment_a, comment_b};
      for (int which = 0; which < 2; ++which) {
        const std::string refine_prompt =
            critloop::render_refinement_prompt(p.statement, bad_text, comments[which]);
        for (int r = 0; r < 2; ++r) {
          const bool fixed = outcomes[static_cast<std::size_t>(which)]
                                     [static_cast<std::size_t>(r)];
          sc.fixtures.add(Role::policy, refine_prompt, r,
                          fixed ? "revised: \\boxed{" + RefinementScenario::answer_for(i) + "}"
                                : "revised: \\boxed{555}");
        }
      }
    }
  }
  return sc;
}

// Writes curated.jsonl and probe-solutions.jsonl so rl-step and evaluate can
// run without a curate pass.
inline void write_scenario_corpus(const RefinementScenario& sc,
                                  const std::filesystem::path& workdir) {
  const auto corpus = workdir / "data" / "corpus";
  std::filesystem::create_directories(corpus);
  critloop::save_problems(corpus / "curated.jsonl", sc.problems);
  std::vector<critloop::SolutionRecord> probe;
  for (int i = 1; i <= 8; ++i) {
    const auto& p = sc.problems[static_cast<std::size_t>(i - 1)];
    probe.push_back(critloop::make_solution_record(p, RefinementScenario::correct_text(i), 0));
    probe.push_back(critloop::make_solution_record(p, RefinementScenario::wrong_text(i), 1));
  }
  critloop::save_solutions(corpus / "probe-solutions.jsonl", probe);
}

}  // namespace testsupport
