#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critloop/answer.hpp"

namespace critloop {

enum class Verdict { correct, incorrect };

// The structured triple parsed from raw critic output: free-form reasoning,
// a binary verdict, and (for incorrect verdicts) the actionable comment the
// policy model refines against.
struct CritiqueParse {
  std::string reasoning;
  Verdict verdict = Verdict::correct;
  std::optional<std::string> comment;
};

enum class ScreenReason { ok, erroneous_judgment, instruction_violation, answer_leakage };

struct ScreenResult {
  bool accepted = false;
  ScreenReason reason = ScreenReason::ok;
};

std::string_view to_string(ScreenReason reason);
std::string_view to_string(Verdict verdict);

// Template rendering. Output is byte-identical to the stored template except
// at the substitution sites; empty inputs are rejected with ContractViolation.
std::string render_critique_prompt(std::string_view problem, std::string_view solution);
std::string render_refinement_prompt(std::string_view problem, std::string_view solution,
                                     std::string_view critique_comment);

// Paragraphs are enclosed in <paragraph_i> tags, indexed from 0, and joined
// into the template's {solution} slot.
std::string render_process_extract_prompt(std::string_view problem,
                                          const std::vector<std::string>& paragraphs);

// Classification prompt for the corpus judge (label contract:
// SOLVABLE / UNSOLVABLE / PROOF / MULTIPLE_CHOICE in a final \boxed{}).
std::string render_judge_prompt(std::string_view problem);

// Splits raw critic output at the last "**Correctness**:" marker. Reasoning is
// everything before the marker (including any <think> spans); the comment is
// the text after the following "**Comment**:" marker. Throws ParseError with
// code no_verdict / no_comment.
CritiqueParse parse_critique(std::string_view raw);

// Rule-based screening for rejection-sampling SFT data. Rules are checked in
// a fixed order: erroneous judgment, instruction violation (boxed span in the
// comment), answer leakage (a comment token math_equal to the ground truth).
ScreenResult screen_sft_sample(const CritiqueParse& parse, bool solution_correct,
                               const FinalAnswer& ground_truth);

// Parse + screen in one step; critiques that fail parse_critique are
// rejected as instruction violations. On acceptance, `parsed` carries the
// triple.
struct RawScreenResult {
  ScreenResult screen;
  std::optional<CritiqueParse> parsed;
};
RawScreenResult screen_raw_critique(std::string_view raw, bool solution_correct,
                                    const FinalAnswer& ground_truth);

}  // namespace critloop
