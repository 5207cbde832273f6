#include "critloop/response_pool.hpp"

#include <algorithm>

#include "critloop/errors.hpp"

namespace critloop {

void ResponsePool::append(SolutionRecord record) {
  if (frozen_)
    throw ContractViolation("response pool '" + problem_id_ + "' is frozen");
  if (record.problem_id != problem_id_)
    throw ContractViolation("response pool '" + problem_id_ + "': record belongs to '" +
                            record.problem_id + "'");
  responses_.push_back(std::move(record));
}

ResponsePool build_response_pool(const ProblemRecord& problem, InferenceClient& policy,
                                 int pool_size, const SamplingParams& params) {
  if (pool_size < 1) throw ContractViolation("build_response_pool: pool_size must be >= 1");
  ResponsePool pool(problem.id);
  std::vector<Message> messages{{"user", problem.statement}};
  // One request for the whole pool: choice index i becomes sample_index i.
  SamplingParams batch = params;
  batch.n = pool_size;
  const SampleResult result = policy.sample_completions(messages, batch);
  for (int i = 0; i < pool_size; ++i)
    pool.append(make_solution_record(problem, result.texts[static_cast<std::size_t>(i)], i));
  pool.freeze();
  return pool;
}

void save_pool(const std::filesystem::path& path, const ResponsePool& pool) {
  if (!pool.frozen()) throw ContractViolation("save_pool: pool must be frozen");
  save_solutions(path, pool.responses());
}

ResponsePool load_pool(const std::filesystem::path& path, const ProblemRecord& problem) {
  ResponsePool pool(problem.id);
  for (auto& record : load_solutions(path)) {
    // Re-derive correctness so the frozen bits always agree with the oracle.
    SolutionRecord rebuilt = make_solution_record(problem, std::move(record.text),
                                                  record.sample_index);
    pool.append(std::move(rebuilt));
  }
  pool.freeze();
  return pool;
}

}  // namespace critloop
