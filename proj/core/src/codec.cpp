#include "critloop/codec.hpp"

#include <cctype>
#include <utility>

#include "critloop/errors.hpp"
#include "critloop/templates.hpp"

namespace critloop {
namespace {

constexpr std::string_view kVerdictMarker = "**Correctness**:";
constexpr std::string_view kCommentMarker = "**Comment**:";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Substitution {
  std::string_view placeholder;  // e.g. "{problem}"
  std::string_view value;
};

// Substitutes the named sites and unescapes the template's source-style
// escaping ({{ }} and \\) everywhere else. Substituted values are inserted
// verbatim, never unescaped.
std::string render_template(std::string_view tpl, std::initializer_list<Substitution> subs) {
  std::string out;
  out.reserve(tpl.size() + 256);
  std::size_t i = 0;
  while (i < tpl.size()) {
    bool replaced = false;
    for (const auto& sub : subs) {
      if (tpl.substr(i).starts_with(sub.placeholder)) {
        out.append(sub.value);
        i += sub.placeholder.size();
        replaced = true;
        break;
      }
    }
    if (replaced) continue;
    if (tpl.substr(i).starts_with("{{")) {
      out.push_back('{');
      i += 2;
    } else if (tpl.substr(i).starts_with("}}")) {
      out.push_back('}');
      i += 2;
    } else if (tpl.substr(i).starts_with("\\\\")) {
      out.push_back('\\');
      i += 2;
    } else {
      out.push_back(tpl[i]);
      ++i;
    }
  }
  return out;
}

void require_non_empty(std::string_view value, std::string_view name) {
  if (value.empty())
    throw ContractViolation("template input '" + std::string(name) + "' must be non-empty");
}

bool contains_boxed_span(std::string_view text) {
  return text.find("\\boxed{") != std::string_view::npos;
}

// Whitespace tokens with sentence punctuation trimmed off the ends. Braces
// stay attached so LaTeX fragments like \frac{1}{2} survive intact; the raw
// token is checked as well.
bool comment_leaks_answer(std::string_view comment, const FinalAnswer& ground_truth) {
  constexpr std::string_view kStrip = ".,;:!?\"'`()";
  std::size_t i = 0;
  while (i < comment.size()) {
    while (i < comment.size() && std::isspace(static_cast<unsigned char>(comment[i]))) ++i;
    std::size_t j = i;
    while (j < comment.size() && !std::isspace(static_cast<unsigned char>(comment[j]))) ++j;
    if (j > i) {
      std::string_view token = comment.substr(i, j - i);
      if (math_equal(make_final_answer(token), ground_truth)) return true;
      std::string_view stripped = token;
      while (!stripped.empty() && kStrip.find(stripped.front()) != std::string_view::npos)
        stripped.remove_prefix(1);
      while (!stripped.empty() && kStrip.find(stripped.back()) != std::string_view::npos)
        stripped.remove_suffix(1);
      if (stripped != token && !stripped.empty() &&
          math_equal(make_final_answer(stripped), ground_truth))
        return true;
    }
    i = j;
  }
  return false;
}

}  // namespace

std::string_view to_string(ScreenReason reason) {
  switch (reason) {
    case ScreenReason::ok: return "ok";
    case ScreenReason::erroneous_judgment: return "erroneous_judgment";
    case ScreenReason::instruction_violation: return "instruction_violation";
    case ScreenReason::answer_leakage: return "answer_leakage";
  }
  return "ok";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::correct ? "correct" : "incorrect";
}

std::string render_critique_prompt(std::string_view problem, std::string_view solution) {
  require_non_empty(problem, "problem");
  require_non_empty(solution, "solution");
  return render_template(templates::critique(),
                         {{"{problem}", problem}, {"{solution}", solution}});
}

std::string render_refinement_prompt(std::string_view problem, std::string_view solution,
                                     std::string_view critique_comment) {
  require_non_empty(problem, "problem");
  require_non_empty(solution, "solution");
  require_non_empty(critique_comment, "critique");
  return render_template(templates::refinement(), {{"{problem}", problem},
                                                   {"{solution}", solution},
                                                   {"{critique}", critique_comment}});
}

std::string render_process_extract_prompt(std::string_view problem,
                                          const std::vector<std::string>& paragraphs) {
  require_non_empty(problem, "problem");
  if (paragraphs.empty())
    throw ContractViolation("render_process_extract_prompt: paragraph list is empty");
  std::string tagged;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    const std::string tag = "paragraph_" + std::to_string(i);
    if (i > 0) tagged.append("\n\n");
    tagged.append("<" + tag + ">\n");
    tagged.append(paragraphs[i]);
    tagged.append("\n</" + tag + ">");
  }
  return render_template(templates::process_extract(),
                         {{"{problem}", problem}, {"{solution}", tagged}});
}

std::string render_judge_prompt(std::string_view problem) {
  require_non_empty(problem, "problem");
  return render_template(templates::judge(), {{"{problem}", problem}});
}

CritiqueParse parse_critique(std::string_view raw) {
  const std::size_t marker = raw.rfind(kVerdictMarker);
  if (marker == std::string_view::npos)
    throw ParseError(ParseError::Code::no_verdict, "no **Correctness** marker in critique");

  std::string_view tail = raw.substr(marker + kVerdictMarker.size());
  std::size_t p = 0;
  while (p < tail.size() && std::isspace(static_cast<unsigned char>(tail[p]))) ++p;
  std::size_t q = p;
  while (q < tail.size() && std::isalpha(static_cast<unsigned char>(tail[q]))) ++q;
  const std::string word = to_lower(tail.substr(p, q - p));

  CritiqueParse parse;
  if (word == "correct") {
    parse.verdict = Verdict::correct;
  } else if (word == "incorrect") {
    parse.verdict = Verdict::incorrect;
  } else {
    throw ParseError(ParseError::Code::no_verdict, "unrecognized verdict after marker");
  }
  parse.reasoning = std::string(raw.substr(0, marker));

  const std::size_t comment_at = tail.find(kCommentMarker);
  if (comment_at != std::string_view::npos) {
    const std::string_view comment = trim(tail.substr(comment_at + kCommentMarker.size()));
    if (!comment.empty()) parse.comment = std::string(comment);
  }
  if (parse.verdict == Verdict::incorrect && !parse.comment)
    throw ParseError(ParseError::Code::no_comment,
                     "verdict is incorrect but no **Comment** follows");
  return parse;
}

ScreenResult screen_sft_sample(const CritiqueParse& parse, bool solution_correct,
                               const FinalAnswer& ground_truth) {
  const bool judged_correct = parse.verdict == Verdict::correct;
  if (judged_correct != solution_correct)
    return {false, ScreenReason::erroneous_judgment};
  if (parse.comment && contains_boxed_span(*parse.comment))
    return {false, ScreenReason::instruction_violation};
  if (parse.comment && comment_leaks_answer(*parse.comment, ground_truth))
    return {false, ScreenReason::answer_leakage};
  return {true, ScreenReason::ok};
}

RawScreenResult screen_raw_critique(std::string_view raw, bool solution_correct,
                                    const FinalAnswer& ground_truth) {
  CritiqueParse parse;
  try {
    parse = parse_critique(raw);
  } catch (const ParseError&) {
    return {{false, ScreenReason::instruction_violation}, std::nullopt};
  }
  const ScreenResult screen = screen_sft_sample(parse, solution_correct, ground_truth);
  return {screen, std::move(parse)};
}

}  // namespace critloop
