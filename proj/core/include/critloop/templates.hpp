#pragma once

#include <string_view>

namespace critloop::templates {

// Prompt templates, embedded verbatim from core/assets/templates/*.txt at
// configure time. Substitution sites are {problem}, {solution}, {critique}.
// The stored form uses source-style escaping: doubled braces ({{ }}) stand
// for literal braces and a doubled backslash for a literal backslash; the
// renderer unescapes non-placeholder segments.
std::string_view critique();
std::string_view refinement();
std::string_view process_extract();
std::string_view judge();

}  // namespace critloop::templates
