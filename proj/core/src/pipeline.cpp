#include "critloop/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "critloop/client.hpp"
#include "critloop/dataset.hpp"
#include "critloop/errors.hpp"
#include "critloop/parallel.hpp"
#include "critloop/response_pool.hpp"
#include "critloop/reward.hpp"
#include "critloop/rng.hpp"

namespace critloop {
namespace {

using nlohmann::json;

Manifest base_manifest(const CommandContext& ctx, std::string command, int step = -1) {
  Manifest m;
  m.command = std::move(command);
  m.step = step;
  m.config_sha256 = ctx.config_sha256;
  m.seed = ctx.config.seed;
  for (const auto& ep : ctx.config.endpoints)
    m.resolved_endpoints[std::string(to_string(ep.role))] = ep.base_url + " " + ep.model_name;
  return m;
}

std::map<std::string, const ProblemRecord*> index_problems(
    const std::vector<ProblemRecord>& problems) {
  std::map<std::string, const ProblemRecord*> index;
  for (const auto& p : problems) {
    if (!index.emplace(p.id, &p).second)
      throw ConfigError("duplicate problem id '" + p.id + "' in corpus");
  }
  return index;
}

// Balanced (one correct, one incorrect) inputs for SFT collection and RL
// rollouts, grouped from the probe solutions. Incomplete generations (no
// extractable final answer) are filtered out before balancing.
std::vector<SolutionRecord> balanced_inputs(const std::vector<ProblemRecord>& problems,
                                            const std::vector<SolutionRecord>& solutions,
                                            std::uint64_t seed) {
  std::map<std::string, std::vector<SolutionRecord>> by_problem;
  for (const auto& s : solutions) {
    if (!s.extracted) continue;
    by_problem[s.problem_id].push_back(s);
  }
  std::vector<SolutionRecord> inputs;
  for (const auto& p : problems) {
    const auto it = by_problem.find(p.id);
    if (it == by_problem.end()) continue;
    for (auto& picked : balance_solutions(it->second, seed)) inputs.push_back(std::move(picked));
  }
  return inputs;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

CommandContext make_context(const std::filesystem::path& config_file) {
  CommandContext ctx;
  ctx.config = load_run_config(config_file);
  ctx.config_sha256 = sha256_hex(read_file(config_file));
  return ctx;
}

namespace files {
std::filesystem::path problems(const Paths& p) { return p.corpus / "problems.jsonl"; }
std::filesystem::path curated(const Paths& p) { return p.corpus / "curated.jsonl"; }
std::filesystem::path probe_solutions(const Paths& p) {
  return p.corpus / "probe-solutions.jsonl";
}
std::filesystem::path sft_accepted(const Paths& p) { return p.corpus / "sft-accepted.jsonl"; }
std::filesystem::path sft_stats(const Paths& p) { return p.reports / "sft-stats.json"; }
std::filesystem::path process_cases(const Paths& p) { return p.corpus / "process-cases.jsonl"; }
std::filesystem::path pool_file(const Paths& p, const std::string& problem_id) {
  return p.pools / ("pool-" + problem_id + ".jsonl");
}
std::filesystem::path eval_report(const Paths& p, const std::string& benchmark) {
  return p.reports / ("eval-" + benchmark + ".jsonl");
}
std::filesystem::path eval_summary(const Paths& p, const std::string& benchmark) {
  return p.reports / ("eval-" + benchmark + "-summary.txt");
}
std::filesystem::path process_report(const Paths& p, const std::string& benchmark) {
  return p.reports / ("process-" + benchmark + ".jsonl");
}
}  // namespace files

CurateResult run_curate(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const auto problems_file = files::problems(cfg.paths);
  std::vector<ProblemRecord> input = load_problems(problems_file);

  CurateResult result;
  result.input_count = static_cast<int>(input.size());

  // Stage 1+2: deduplication.
  std::vector<ProblemRecord> kept = dedup_exact(input);
  result.exact_dropped = result.input_count - static_cast<int>(kept.size());
  if (cfg.curation.semantic_dedup) {
    InferenceClient embedder(cfg.require_endpoint(Role::embeddings));
    constexpr std::size_t kBatch = 32;
    for (std::size_t at = 0; at < kept.size(); at += kBatch) {
      const std::size_t end = std::min(at + kBatch, kept.size());
      std::vector<std::string> texts;
      for (std::size_t i = at; i < end; ++i) texts.push_back(kept[i].statement);
      auto vectors = embedder.fetch_embeddings(texts);
      for (std::size_t i = at; i < end; ++i) kept[i].embedding = std::move(vectors[i - at]);
    }
    const int before = static_cast<int>(kept.size());
    kept = dedup(kept, cfg.curation.dedup_threshold);
    result.semantic_dropped = before - static_cast<int>(kept.size());
  }

  // Stage 3: judge screening with a bounded retry queue for unparseable
  // replies.
  {
    InferenceClient judge(cfg.require_endpoint(Role::judge));
    SamplingParams params = cfg.sampling_for(Role::judge);
    params.n = 1;
    std::vector<int> decisions(kept.size(), -1);  // -1 unparseable, else JudgeVerdict
    run_parallel(judge.endpoint().max_concurrency, kept.size(), [&](std::size_t i) {
      const std::string prompt = render_judge_prompt(kept[i].statement);
      std::vector<Message> messages{{"user", prompt}};
      for (int attempt = 0; attempt <= cfg.curation.judge_retries; ++attempt) {
        const SampleResult reply = judge.sample_completions(messages, params);
        try {
          decisions[i] = static_cast<int>(judge_screen(kept[i], reply.texts.front()));
          return;
        } catch (const JudgeParseError&) {
          // retry, then drop after the budget
        }
      }
    });
    std::vector<ProblemRecord> screened;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      switch (decisions[i]) {
        case -1: ++result.judge_dropped_unparseable; break;
        case static_cast<int>(JudgeVerdict::keep): screened.push_back(std::move(kept[i])); break;
        case static_cast<int>(JudgeVerdict::drop_unsolvable):
          ++result.judge_dropped_unsolvable;
          break;
        case static_cast<int>(JudgeVerdict::drop_proof): ++result.judge_dropped_proof; break;
        case static_cast<int>(JudgeVerdict::drop_multiple_choice):
          ++result.judge_dropped_multiple_choice;
          break;
        default: break;
      }
    }
    kept = std::move(screened);
  }

  // Stage 4: difficulty balancing from n probe solutions per problem.
  std::vector<SolutionRecord> probe_solutions;
  {
    InferenceClient policy(cfg.require_endpoint(Role::policy));
    SamplingParams params = cfg.sampling_for(Role::policy);
    params.n = cfg.curation.difficulty_samples;
    std::vector<std::vector<SolutionRecord>> sampled(kept.size());
    run_parallel(policy.endpoint().max_concurrency, kept.size(), [&](std::size_t i) {
      std::vector<Message> messages{{"user", kept[i].statement}};
      const SampleResult replies = policy.sample_completions(messages, params);
      for (std::size_t k = 0; k < replies.texts.size(); ++k)
        sampled[i].push_back(make_solution_record(kept[i], replies.texts[k],
                                                  static_cast<int>(k)));
    });
    std::vector<ProblemRecord> survivors;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      int pass_count = 0;
      for (const auto& s : sampled[i]) pass_count += s.correct ? 1 : 0;
      if (difficulty_balance(pass_count, cfg.curation.difficulty_samples) ==
          DifficultyDecision::keep) {
        survivors.push_back(std::move(kept[i]));
        for (auto& s : sampled[i]) probe_solutions.push_back(std::move(s));
      } else {
        ++result.difficulty_dropped;
      }
    }
    kept = std::move(survivors);
  }

  result.survivors = static_cast<int>(kept.size());
  std::filesystem::create_directories(cfg.paths.corpus);
  result.curated_file = files::curated(cfg.paths);
  result.probe_solutions_file = files::probe_solutions(cfg.paths);
  save_problems(result.curated_file, kept);
  save_solutions(result.probe_solutions_file, probe_solutions);

  Manifest m = base_manifest(ctx, "curate");
  m.add_input(problems_file);
  m.add_output(result.curated_file);
  m.add_output(result.probe_solutions_file);
  m.write(cfg.paths.reports);
  return result;
}

SftResult run_collect_sft(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const auto curated_file = files::curated(cfg.paths);
  const auto solutions_file = files::probe_solutions(cfg.paths);
  const std::vector<ProblemRecord> problems = load_problems(curated_file);
  const std::vector<SolutionRecord> solutions = load_solutions(solutions_file);
  const auto by_id = index_problems(problems);

  const std::vector<SolutionRecord> inputs = balanced_inputs(problems, solutions, cfg.seed);

  InferenceClient critic(cfg.require_endpoint(Role::critic));
  SamplingParams params = cfg.sampling_for(Role::critic);
  params.n = cfg.sft_samples_per_solution;

  struct Collected {
    std::vector<std::string> critiques;
  };
  std::vector<Collected> collected(inputs.size());
  run_parallel(critic.endpoint().max_concurrency, inputs.size(), [&](std::size_t i) {
    const ProblemRecord& problem = *by_id.at(inputs[i].problem_id);
    const std::string prompt = render_critique_prompt(problem.statement, inputs[i].text);
    std::vector<Message> messages{{"user", prompt}};
    collected[i].critiques = critic.sample_completions(messages, params).texts;
  });

  SftResult result;
  std::vector<std::string> accepted_lines;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const ProblemRecord& problem = *by_id.at(inputs[i].problem_id);
    for (const auto& raw : collected[i].critiques) {
      ++result.critiques_total;
      const RawScreenResult screened =
          screen_raw_critique(raw, inputs[i].correct, problem.answer);
      if (!screened.screen.accepted) {
        ++result.rejections[std::string(to_string(screened.screen.reason))];
        continue;
      }
      ++result.accepted;
      json j;
      j["problem_id"] = problem.id;
      j["statement"] = problem.statement;
      j["solution"] = inputs[i].text;
      j["solution_correct"] = inputs[i].correct;
      j["sample_index"] = inputs[i].sample_index;
      j["critique"] = raw;
      j["verdict"] = to_string(screened.parsed->verdict);
      accepted_lines.push_back(j.dump());
    }
  }

  std::filesystem::create_directories(cfg.paths.corpus);
  std::filesystem::create_directories(cfg.paths.reports);
  result.accepted_file = files::sft_accepted(cfg.paths);
  {
    std::ofstream out(result.accepted_file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + result.accepted_file.string());
    for (const auto& line : accepted_lines) out << line << '\n';
  }
  result.stats_file = files::sft_stats(cfg.paths);
  json stats;
  stats["critiques_total"] = result.critiques_total;
  stats["accepted"] = result.accepted;
  stats["rejections"] = result.rejections;
  write_json_file(result.stats_file, stats);

  Manifest m = base_manifest(ctx, "collect-sft");
  m.add_input(curated_file);
  m.add_input(solutions_file);
  m.add_output(result.accepted_file);
  m.add_output(result.stats_file);
  m.write(cfg.paths.reports);
  return result;
}

RlStepResult run_rl_step(const CommandContext& ctx, int step) {
  const RunConfig& cfg = ctx.config;
  RlStepResult result;
  if (training_complete(step, cfg.reward)) {
    result.halted = true;
    return result;
  }
  result.lambda = lambda_schedule(step, cfg.reward);

  const auto curated_file = files::curated(cfg.paths);
  const auto solutions_file = files::probe_solutions(cfg.paths);
  const std::vector<ProblemRecord> problems = load_problems(curated_file);
  const std::vector<SolutionRecord> solutions = load_solutions(solutions_file);
  const auto by_id = index_problems(problems);

  const std::vector<SolutionRecord> available = balanced_inputs(problems, solutions, cfg.seed);
  if (static_cast<int>(available.size()) < cfg.rl_inputs_per_step)
    throw BatchError("rl-step: " + std::to_string(available.size()) +
                     " inputs available, need " + std::to_string(cfg.rl_inputs_per_step));

  SplitMix64 selector = derive_rng(cfg.seed, 0x9000ULL + static_cast<std::uint64_t>(step));
  const std::vector<std::size_t> chosen = sample_without_replacement(
      selector, available.size(), static_cast<std::size_t>(cfg.rl_inputs_per_step));

  InferenceClient critic(cfg.require_endpoint(Role::critic));
  InferenceClient policy(cfg.require_endpoint(Role::policy));
  SamplingParams critic_params = cfg.sampling_for(Role::critic);
  critic_params.n = cfg.reward.group_size;
  SamplingParams refine_params = cfg.sampling_for(Role::policy);
  refine_params.n = cfg.reward.m;

  const double lambda = result.lambda;
  std::vector<std::vector<TrainingExample>> groups(chosen.size());
  std::atomic<int> gated{0};
  run_parallel(critic.endpoint().max_concurrency, chosen.size(), [&](std::size_t slot) {
    const SolutionRecord& y0 = available[chosen[slot]];
    const ProblemRecord& problem = *by_id.at(y0.problem_id);
    const std::string group_id = problem.id + "#" + std::to_string(y0.sample_index);
    const std::string prompt = render_critique_prompt(problem.statement, y0.text);
    std::vector<Message> messages{{"user", prompt}};
    const SampleResult critiques = critic.sample_completions(messages, critic_params);

    std::vector<TrainingExample> group;
    for (int g = 0; g < cfg.reward.group_size; ++g) {
      const std::string& raw = critiques.texts[static_cast<std::size_t>(g)];
      TrainingExample ex;
      ex.prompt = prompt;
      ex.critique = raw;
      ex.record.problem_id = problem.id;
      ex.record.group_id = group_id;
      ex.record.critique_index = g;
      ex.record.solution_correct = y0.correct;

      std::optional<CritiqueParse> parse;
      try {
        parse = parse_critique(raw);
      } catch (const ParseError&) {
        parse = std::nullopt;
      }
      // Unparseable critiques score as wrong judgments.
      ex.record.judged_correct = parse ? parse->verdict == Verdict::correct : !y0.correct;
      ex.record.judgment = judgment_reward(y0.correct, ex.record.judged_correct);

      const bool gate = !y0.correct && !ex.record.judged_correct;
      if (gate && lambda > 0.0 && parse && parse->comment) {
        gated.fetch_add(1, std::memory_order_relaxed);
        const std::string refine_prompt =
            render_refinement_prompt(problem.statement, y0.text, *parse->comment);
        std::vector<Message> refine_messages{{"user", refine_prompt}};
        const SampleResult refined = policy.sample_completions(refine_messages, refine_params);
        for (const auto& text : refined.texts) {
          const SolutionRecord record = make_solution_record(problem, text, 0);
          ex.record.refinement_correct.push_back(record.correct);
        }
        ex.record.refinement = refinement_reward(y0.correct, ex.record.judged_correct,
                                                 ex.record.refinement_correct);
      }
      ex.record.reward = combined_reward(ex.record.judgment, ex.record.refinement, lambda);
      group.push_back(std::move(ex));
    }

    std::vector<double> rewards;
    rewards.reserve(group.size());
    for (const auto& ex : group) rewards.push_back(ex.record.reward);
    const std::vector<double> advantages = group_advantages(rewards, cfg.reward.epsilon);
    for (std::size_t g = 0; g < group.size(); ++g) group[g].record.advantage = advantages[g];
    groups[slot] = std::move(group);
  });

  std::vector<TrainingExample> examples;
  for (auto& group : groups)
    for (auto& ex : group) examples.push_back(std::move(ex));

  result.inputs = cfg.rl_inputs_per_step;
  result.gated_refinements = gated.load();
  result.batch_file = export_training_batch(examples, step, cfg.reward.group_size,
                                            cfg.rl_inputs_per_step, cfg.paths.batches);

  Manifest m = base_manifest(ctx, "rl-step", step);
  m.add_input(curated_file);
  m.add_input(solutions_file);
  m.add_output(result.batch_file);
  m.write(cfg.paths.reports);
  return result;
}

BuildPoolsResult run_build_pools(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const auto curated_file = files::curated(cfg.paths);
  const std::vector<ProblemRecord> problems = load_problems(curated_file);

  InferenceClient policy(cfg.require_endpoint(Role::policy));
  SamplingParams params = cfg.sampling_for(Role::policy);

  std::filesystem::create_directories(cfg.paths.pools);
  BuildPoolsResult result;
  result.pool_files.resize(problems.size());
  run_parallel(policy.endpoint().max_concurrency, problems.size(), [&](std::size_t i) {
    const ResponsePool pool = build_response_pool(problems[i], policy, cfg.eval.pool_size,
                                                  params);
    const auto path = files::pool_file(cfg.paths, problems[i].id);
    save_pool(path, pool);
    result.pool_files[i] = path;
  });

  Manifest m = base_manifest(ctx, "build-pools");
  m.add_input(curated_file);
  for (const auto& file : result.pool_files) m.add_output(file);
  m.write(cfg.paths.reports);
  return result;
}

EvaluateResult run_evaluate(const CommandContext& ctx, std::vector<int> n_values) {
  const RunConfig& cfg = ctx.config;
  if (n_values.empty()) n_values = cfg.eval.n_values;
  const auto curated_file = files::curated(cfg.paths);
  const std::vector<ProblemRecord> problems = load_problems(curated_file);
  if (problems.empty()) throw ConfigError("evaluate: curated corpus is empty");

  std::vector<ResponsePool> pools;
  pools.reserve(problems.size());
  for (const auto& problem : problems) {
    const auto path = files::pool_file(cfg.paths, problem.id);
    if (!std::filesystem::exists(path))
      throw ConfigError("evaluate: missing pool file " + path.string() +
                        " (run build-pools first)");
    pools.push_back(load_pool(path, problem));
  }
  for (std::size_t i = 0; i < pools.size(); ++i) {
    for (int n : n_values) {
      if (static_cast<std::size_t>(n) > pools[i].size())
        throw ConfigError("evaluate: n=" + std::to_string(n) + " exceeds pool size " +
                          std::to_string(pools[i].size()));
    }
  }

  InferenceClient critic(cfg.require_endpoint(Role::critic));
  InferenceClient policy(cfg.require_endpoint(Role::policy));
  SamplingParams critic_params = cfg.sampling_for(Role::critic);
  critic_params.n = 1;
  SamplingParams refine_params = cfg.sampling_for(Role::policy);
  refine_params.n = 1;

  struct PerProblem {
    std::vector<Verdict> verdicts;
    std::optional<std::string> first_comment;
  };
  std::vector<PerProblem> judged(problems.size());
  run_parallel(critic.endpoint().max_concurrency, problems.size(), [&](std::size_t i) {
    PerProblem& out = judged[i];
    out.verdicts.resize(pools[i].size(), Verdict::correct);
    for (std::size_t r = 0; r < pools[i].size(); ++r) {
      const SolutionRecord& response = pools[i].responses()[r];
      const std::string prompt = render_critique_prompt(problems[i].statement, response.text);
      std::vector<Message> messages{{"user", prompt}};
      const SampleResult reply = critic.sample_completions(messages, critic_params);
      try {
        const CritiqueParse parse = parse_critique(reply.texts.front());
        out.verdicts[r] = parse.verdict;
        if (r == 0 && parse.comment) out.first_comment = parse.comment;
      } catch (const ParseError&) {
        out.verdicts[r] = Verdict::correct;  // unusable critique keeps the solution
      }
    }
  });

  // Refinement-after-critique episodes seeded from each pool's first response.
  std::vector<Episode> episodes(problems.size());
  run_parallel(policy.endpoint().max_concurrency, problems.size(), [&](std::size_t i) {
    Episode ep;
    ep.problem_id = problems[i].id;
    ep.initial = pools[i].responses()[0];
    ep.verdict = judged[i].verdicts[0];
    if (ep.verdict == Verdict::incorrect) {
      if (!judged[i].first_comment)
        throw WireError("critic flagged '" + problems[i].id + "' without a comment");
      const std::string prompt = render_refinement_prompt(problems[i].statement,
                                                          ep.initial.text,
                                                          *judged[i].first_comment);
      std::vector<Message> messages{{"user", prompt}};
      const SampleResult reply = policy.sample_completions(messages, refine_params);
      ep.refined = make_solution_record(problems[i], reply.texts.front(), 0);
    }
    episodes[i] = std::move(ep);
  });

  EvaluateResult result;
  const std::uint64_t seed = cfg.eval_seed();
  result.metrics.push_back({cfg.eval.benchmark, "pass_r@1", 1, static_cast<int>(episodes.size()),
                            seed, pass_r_at_1(episodes)});
  for (int n : n_values) {
    double plain = 0.0, filtered = 0.0;
    for (std::size_t i = 0; i < pools.size(); ++i) {
      plain += trial_estimate(pools[i].responses(), judged[i].verdicts, problems[i].answer, n,
                              cfg.eval.trials, seed, MajorityMode::plain);
      filtered += trial_estimate(pools[i].responses(), judged[i].verdicts, problems[i].answer,
                                 n, cfg.eval.trials, seed, MajorityMode::filtered);
    }
    plain /= static_cast<double>(pools.size());
    filtered /= static_cast<double>(pools.size());
    result.metrics.push_back(
        {cfg.eval.benchmark, "maj@" + std::to_string(n), n, cfg.eval.trials, seed, plain});
    result.metrics.push_back(
        {cfg.eval.benchmark, "maj_c@" + std::to_string(n), n, cfg.eval.trials, seed, filtered});
  }

  std::filesystem::create_directories(cfg.paths.reports);
  result.report_file = files::eval_report(cfg.paths, cfg.eval.benchmark);
  save_metrics(result.report_file, result.metrics);
  result.summary_file = files::eval_summary(cfg.paths, cfg.eval.benchmark);
  {
    std::ofstream out(result.summary_file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + result.summary_file.string());
    out << format_metric_table(result.metrics);
  }

  Manifest m = base_manifest(ctx, "evaluate");
  m.add_input(curated_file);
  for (std::size_t i = 0; i < problems.size(); ++i)
    m.add_input(files::pool_file(cfg.paths, problems[i].id));
  m.add_output(result.report_file);
  m.add_output(result.summary_file);
  m.write(cfg.paths.reports);
  return result;
}

ScoreProcessResult run_score_process(const CommandContext& ctx,
                                     std::filesystem::path cases_file) {
  const RunConfig& cfg = ctx.config;
  if (cases_file.empty()) cases_file = files::process_cases(cfg.paths);
  std::vector<ProcessCase> cases = load_process_cases(cases_file);
  if (cases.empty()) throw ConfigError("score-process: no cases in " + cases_file.string());

  InferenceClient extractor(cfg.require_endpoint(Role::extractor));
  SamplingParams params = cfg.sampling_for(Role::extractor);
  params.n = 1;
  run_parallel(extractor.endpoint().max_concurrency, cases.size(), [&](std::size_t i) {
    const std::string prompt = render_process_extract_prompt(cases[i].problem,
                                                             cases[i].paragraphs);
    std::vector<Message> messages{{"user", prompt}};
    const SampleResult reply = extractor.sample_completions(messages, params);
    cases[i].predicted = extract_error_step(reply.texts.front(),
                                            static_cast<int>(cases[i].paragraphs.size()));
  });

  ScoreProcessResult result;
  result.cases = static_cast<int>(cases.size());
  for (const auto& c : cases)
    if (!c.predicted) ++result.abstains;
  result.score = processbench_score(cases);

  std::filesystem::create_directories(cfg.paths.reports);
  result.report_file = files::process_report(cfg.paths, cfg.eval.benchmark);
  std::vector<MetricRecord> metrics{
      {cfg.eval.benchmark, "process_acc_correct", 0, result.cases, cfg.seed,
       result.score.acc_correct},
      {cfg.eval.benchmark, "process_acc_incorrect", 0, result.cases, cfg.seed,
       result.score.acc_incorrect},
      {cfg.eval.benchmark, "process_f1", 0, result.cases, cfg.seed, result.score.f1},
  };
  save_metrics(result.report_file, metrics);

  Manifest m = base_manifest(ctx, "score-process");
  m.add_input(cases_file);
  m.add_output(result.report_file);
  m.write(cfg.paths.reports);
  return result;
}

}  // namespace critloop
