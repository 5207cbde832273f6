// Command-line surface for the critique/refinement pipeline: corpus curation,
// SFT data collection, RL reward batches, response pools, evaluation and
// step-level error localization scoring. Every command reads one JSON config
// and writes a manifest next to its outputs.

#include <unistd.h>

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "critloop/client.hpp"
#include "critloop/errors.hpp"
#include "critloop/pipeline.hpp"
#include "critloop/scripted_server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEndpoint = 3;
constexpr int kExitContract = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

critloop::CommandContext load_context(const CommonArgs& args) {
  critloop::CommandContext ctx = critloop::make_context(args.config_path);
  if (args.seed) ctx.config.seed = *args.seed;
  return ctx;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the config seed");
}

int run_serve_scripted(const std::string& fixtures_dir, int port, bool strict,
                       const std::vector<std::string>& models) {
  std::map<std::string, critloop::Role> roles;
  for (const auto& spec : models) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw critloop::ConfigError("--model expects role=model_name, got '" + spec + "'");
    roles[spec.substr(eq + 1)] = critloop::role_from_string(spec.substr(0, eq));
  }
  critloop::ScriptedServer::Options options;
  options.strict = strict;
  critloop::ScriptedServer server(critloop::FixtureStore::load_dir(fixtures_dir),
                                  std::move(roles), options);
  const int actual = server.start(port);
  std::cout << "scripted server listening on http://127.0.0.1:" << actual << std::endl;
  // Serve until killed.
  std::signal(SIGINT, [](int) {});
  std::signal(SIGTERM, [](int) {});
  pause();
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch harness for critique-and-refine pipelines"};
  app.require_subcommand(1);

  CommonArgs curate_args, sft_args, rl_args, pools_args, eval_args, process_args;
  int rl_step = 0;
  std::vector<int> eval_n;
  std::string process_cases_path;

  auto* curate = app.add_subcommand("curate", "Dedup, judge-screen and difficulty-balance "
                                              "the problem corpus");
  add_common(curate, curate_args);

  auto* sft = app.add_subcommand("collect-sft", "Sample critiques and keep those passing the "
                                                "rejection screens");
  add_common(sft, sft_args);

  auto* rl = app.add_subcommand("rl-step", "Run one reward rollout and export a training "
                                           "batch");
  add_common(rl, rl_args);
  rl->add_option("--step", rl_step, "Training step (drives the lambda schedule)")->required();

  auto* pools = app.add_subcommand("build-pools", "Pre-sample frozen response pools");
  add_common(pools, pools_args);

  auto* evaluate = app.add_subcommand("evaluate", "Pass_r@1 and Maj/Maj_c@N over the pools");
  add_common(evaluate, eval_args);
  evaluate->add_option("--n", eval_n, "Majority-vote sizes (default: config eval.n_values)");

  auto* process = app.add_subcommand("score-process", "Step-level error localization F1");
  add_common(process, process_args);
  process->add_option("--cases", process_cases_path, "Process cases file (JSONL)");

  std::string fixtures_dir;
  int serve_port = 0;
  bool strict_fixtures = false;
  std::vector<std::string> serve_models;
  auto* serve = app.add_subcommand("serve-scripted", "Run the deterministic fixture-backed "
                                                     "model server");
  serve->add_option("--fixtures", fixtures_dir, "Fixture directory (*.jsonl)")->required();
  serve->add_option("--port", serve_port, "Port to bind (default: ephemeral)");
  serve->add_flag("--strict-fixtures", strict_fixtures,
                  "404 on unknown fingerprints instead of a default reply");
  serve->add_option("--model", serve_models, "role=model_name mapping (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (curate->parsed()) {
      const auto ctx = load_context(curate_args);
      const auto result = critloop::run_curate(ctx);
      std::cout << "curate: " << result.input_count << " problems in, " << result.survivors
                << " kept (exact_dup " << result.exact_dropped << ", semantic_dup "
                << result.semantic_dropped << ", unsolvable "
                << result.judge_dropped_unsolvable << ", proof " << result.judge_dropped_proof
                << ", multiple_choice " << result.judge_dropped_multiple_choice
                << ", judge_unparseable " << result.judge_dropped_unparseable
                << ", difficulty " << result.difficulty_dropped << ")\n"
                << "curate: wrote " << result.curated_file.string() << "\n";
    } else if (sft->parsed()) {
      const auto ctx = load_context(sft_args);
      const auto result = critloop::run_collect_sft(ctx);
      std::cout << "collect-sft: accepted " << result.accepted << " of "
                << result.critiques_total << " critiques\n";
      for (const auto& [reason, count] : result.rejections)
        std::cout << "collect-sft: rejected " << count << " (" << reason << ")\n";
    } else if (rl->parsed()) {
      const auto ctx = load_context(rl_args);
      const auto result = critloop::run_rl_step(ctx, rl_step);
      if (result.halted) {
        std::cout << "rl-step: schedule complete at step " << rl_step
                  << "; no batch emitted\n";
      } else {
        std::cout << "rl-step: step " << rl_step << " lambda " << result.lambda << ", "
                  << result.inputs << " inputs, " << result.gated_refinements
                  << " gated refinements\n"
                  << "rl-step: wrote " << result.batch_file.string() << "\n";
      }
    } else if (pools->parsed()) {
      const auto ctx = load_context(pools_args);
      const auto result = critloop::run_build_pools(ctx);
      std::cout << "build-pools: wrote " << result.pool_files.size() << " pools\n";
    } else if (evaluate->parsed()) {
      const auto ctx = load_context(eval_args);
      const auto result = critloop::run_evaluate(ctx, eval_n);
      std::cout << critloop::format_metric_table(result.metrics);
      std::cout << "evaluate: wrote " << result.report_file.string() << "\n";
    } else if (process->parsed()) {
      const auto ctx = load_context(process_args);
      const auto result = critloop::run_score_process(
          ctx, process_cases_path.empty() ? std::filesystem::path{}
                                          : std::filesystem::path(process_cases_path));
      std::cout << "score-process: " << result.cases << " cases, " << result.abstains
                << " abstains, acc_correct " << result.score.acc_correct
                << ", acc_incorrect " << result.score.acc_incorrect << ", f1 "
                << result.score.f1 << "\n";
    } else if (serve->parsed()) {
      return run_serve_scripted(fixtures_dir, serve_port, strict_fixtures, serve_models);
    }
  } catch (const critloop::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const critloop::EndpointError& e) {
    std::cerr << "endpoint error: " << e.what() << "\n";
    for (const auto& [id, usage] : critloop::endpoint_usage_snapshot())
      std::cerr << "endpoint " << id << ": " << usage.requests << " requests, "
                << usage.retries << " retries, " << usage.failures << " failures\n";
    return kExitEndpoint;
  } catch (const critloop::WireError& e) {
    std::cerr << "endpoint error: " << e.what() << "\n";
    for (const auto& [id, usage] : critloop::endpoint_usage_snapshot())
      std::cerr << "endpoint " << id << ": " << usage.requests << " requests, "
                << usage.retries << " retries, " << usage.failures << " failures\n";
    return kExitEndpoint;
  } catch (const critloop::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const critloop::BatchError& e) {
    std::cerr << "batch error: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
