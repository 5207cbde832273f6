#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "critloop/client.hpp"
#include "critloop/records.hpp"

namespace critloop {

// A frozen set of pre-sampled solutions for one problem. Estimators draw
// subsets from it; once frozen it cannot change, so every metric reads the
// same correctness bits.
class ResponsePool {
 public:
  explicit ResponsePool(std::string problem_id) : problem_id_(std::move(problem_id)) {}

  void append(SolutionRecord record);
  void freeze() { frozen_ = true; }

  const std::string& problem_id() const { return problem_id_; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return responses_.size(); }
  std::span<const SolutionRecord> responses() const { return responses_; }

 private:
  std::string problem_id_;
  std::vector<SolutionRecord> responses_;
  bool frozen_ = false;
};

// Samples `pool_size` policy solutions, extracts final answers, sets
// correctness against the problem's ground truth and freezes the pool.
// Endpoint failures propagate; the pool is never partially filled.
ResponsePool build_response_pool(const ProblemRecord& problem, InferenceClient& policy,
                                 int pool_size, const SamplingParams& params);

void save_pool(const std::filesystem::path& path, const ResponsePool& pool);
ResponsePool load_pool(const std::filesystem::path& path, const ProblemRecord& problem);

}  // namespace critloop
