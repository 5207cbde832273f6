#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace critloop {

// A final answer extracted from model output. `raw` is the text exactly as it
// appeared inside the box; `canonical` is the normalized form used for
// comparison (trimmed, outer math delimiters and braces stripped).
struct FinalAnswer {
  std::string raw;
  std::string canonical;

  bool operator==(const FinalAnswer&) const = default;
};

// Builds a FinalAnswer from arbitrary answer text.
FinalAnswer make_final_answer(std::string_view raw);

// Normalization applied to produce FinalAnswer::canonical. Deterministic and
// idempotent: trims whitespace, then repeatedly strips one layer of
// surrounding $...$, \(...\), \[...\] or {...}.
std::string canonicalize_answer(std::string_view raw);

// Returns the content of the last balanced \boxed{...} span in `text`,
// with nested braces matched, or nullopt when no balanced span exists.
std::optional<FinalAnswer> extract_boxed(std::string_view text);

// The "math equal" predicate. Equivalence ladder, in order:
//   1. canonical string equality,
//   2. equality after removing all internal whitespace,
//   3. exact rational comparison when both sides parse as numbers
//      (integers, decimals, p/q, \frac{p}{q}); decimals are converted to
//      exact rationals, never compared with an epsilon,
//   4. string equality after rewriting \frac{p}{q} -> p/q (symbolic
//      fractions included).
// Symmetric and reflexive. Unparseable pairs fall back to step 4.
bool math_equal(const FinalAnswer& a, const FinalAnswer& b);

// Convenience overload for raw answer strings.
bool math_equal(std::string_view a, std::string_view b);

}  // namespace critloop
