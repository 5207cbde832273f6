#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critloop/records.hpp"

namespace critloop {

// Statement canonicalization used by exact deduplication: removes the special
// characters $ [ ] ( ) { } \, collapses whitespace runs, lowercases, trims.
// Idempotent.
std::string canonicalize_statement(std::string_view statement);

// Two-stage deduplication. Stage one drops records whose canonical statement
// was already seen (earliest kept); stage two greedily scans in input order
// and drops any record whose cosine similarity with an already-kept record
// exceeds `threshold`. Requires embeddings on every record that reaches the
// semantic stage; input order is preserved.
std::vector<ProblemRecord> dedup(std::span<const ProblemRecord> problems, double threshold);

// Exact stage only, for corpora without embeddings.
std::vector<ProblemRecord> dedup_exact(std::span<const ProblemRecord> problems);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

enum class JudgeVerdict { keep, drop_unsolvable, drop_proof, drop_multiple_choice };

// Maps a judge endpoint reply onto the keep/drop label contract. The label is
// read from the reply's final \boxed{} span; anything else raises
// JudgeParseError (callers route the record to a retry queue).
JudgeVerdict judge_screen(const ProblemRecord& problem, std::string_view judge_reply);

enum class DifficultyDecision { keep, drop };

// Drops problems the probe model solves always or never (pass_count 0 or n).
DifficultyDecision difficulty_balance(int pass_count, int n);

// Retains at most one correct and one incorrect solution, chosen uniformly
// with a pinned seeded generator. Problems with a single outcome class are
// excluded entirely (empty result).
std::vector<SolutionRecord> balance_solutions(std::span<const SolutionRecord> solutions,
                                              std::uint64_t seed);

}  // namespace critloop
