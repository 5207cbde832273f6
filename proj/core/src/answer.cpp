#include "critloop/answer.hpp"

#include <cctype>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>

namespace critloop {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// One layer of surrounding delimiters: $...$, \(...\), \[...\], {...}.
// For braces the pair must actually match (e.g. "{1}{2}" keeps its braces).
bool strip_one_delimiter(std::string_view& s) {
  if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
    s = s.substr(1, s.size() - 2);
    return true;
  }
  if (s.size() >= 4 && s.substr(0, 2) == "\\(" && s.substr(s.size() - 2) == "\\)") {
    s = s.substr(2, s.size() - 4);
    return true;
  }
  if (s.size() >= 4 && s.substr(0, 2) == "\\[" && s.substr(s.size() - 2) == "\\]") {
    s = s.substr(2, s.size() - 4);
    return true;
  }
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '{') ++depth;
      if (s[i] == '}') {
        --depth;
        if (depth == 0 && i + 1 != s.size()) return false;  // first { closes early
      }
    }
    if (depth != 0) return false;
    s = s.substr(1, s.size() - 2);
    return true;
  }
  return false;
}

std::string remove_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!is_space(c)) out.push_back(c);
  return out;
}

// Exact rational over int64 with overflow detection. Anything that would
// overflow simply fails to parse and falls through to string comparison.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static std::optional<Rational> make(std::int64_t n, std::int64_t d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
      if (n == std::numeric_limits<std::int64_t>::min() ||
          d == std::numeric_limits<std::int64_t>::min())
        return std::nullopt;
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n, d);
    return Rational{g ? n / g : n, g ? d / g : d};
  }

  bool operator==(const Rational&) const = default;
};

std::optional<Rational> rational_div(const Rational& a, const Rational& b) {
  if (b.num == 0) return std::nullopt;
  std::int64_t n = 0, d = 0;
  if (__builtin_mul_overflow(a.num, b.den, &n)) return std::nullopt;
  if (__builtin_mul_overflow(a.den, b.num, &d)) return std::nullopt;
  return Rational::make(n, d);
}

// Grammar for a single numeric literal: sign? digits ('.' digits)? with at
// least one digit somewhere. Consumes from `pos`.
std::optional<Rational> parse_numeric_literal(std::string_view s, std::size_t& pos) {
  std::size_t p = pos;
  bool negative = false;
  if (p < s.size() && (s[p] == '+' || s[p] == '-')) {
    negative = s[p] == '-';
    ++p;
  }
  std::int64_t integral = 0;
  std::size_t int_digits = 0;
  while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
    if (__builtin_mul_overflow(integral, std::int64_t{10}, &integral)) return std::nullopt;
    if (__builtin_add_overflow(integral, std::int64_t{s[p] - '0'}, &integral))
      return std::nullopt;
    ++p;
    ++int_digits;
  }
  std::int64_t scale = 1;
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (p < s.size() && s[p] == '.') {
    ++p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
      if (__builtin_mul_overflow(frac, std::int64_t{10}, &frac)) return std::nullopt;
      if (__builtin_add_overflow(frac, std::int64_t{s[p] - '0'}, &frac)) return std::nullopt;
      if (__builtin_mul_overflow(scale, std::int64_t{10}, &scale)) return std::nullopt;
      ++p;
      ++frac_digits;
    }
    if (frac_digits == 0) return std::nullopt;
  }
  if (int_digits == 0 && frac_digits == 0) return std::nullopt;
  std::int64_t num = 0;
  if (__builtin_mul_overflow(integral, scale, &num)) return std::nullopt;
  if (__builtin_add_overflow(num, frac, &num)) return std::nullopt;
  if (negative) num = -num;
  pos = p;
  return Rational::make(num, scale);
}

// \frac{p}{q} (also \dfrac, \tfrac) with numeric p and q.
std::optional<Rational> parse_frac(std::string_view s, std::size_t& pos) {
  std::size_t p = pos;
  for (std::string_view kw : {"\\frac", "\\dfrac", "\\tfrac"}) {
    if (s.substr(p).starts_with(kw)) {
      p += kw.size();
      if (p >= s.size() || s[p] != '{') return std::nullopt;
      ++p;
      auto num = parse_numeric_literal(s, p);
      if (!num || p >= s.size() || s[p] != '}') return std::nullopt;
      ++p;
      if (p >= s.size() || s[p] != '{') return std::nullopt;
      ++p;
      auto den = parse_numeric_literal(s, p);
      if (!den || p >= s.size() || s[p] != '}') return std::nullopt;
      ++p;
      pos = p;
      return rational_div(*num, *den);
    }
  }
  return std::nullopt;
}

// Full numeric expression: sign? (frac | literal ('/' literal)?). The whole
// string must be consumed.
std::optional<Rational> parse_rational(std::string_view text) {
  const std::string s = remove_whitespace(text);
  std::string_view v{s};
  std::size_t pos = 0;
  bool negative = false;
  if (pos < v.size() && (v[pos] == '+' || v[pos] == '-')) {
    // A leading sign in front of a \frac; plain literals handle their own.
    if (v.substr(pos + 1).starts_with('\\')) {
      negative = v[pos] == '-';
      ++pos;
    }
  }
  std::optional<Rational> value;
  if (pos < v.size() && v[pos] == '\\') {
    value = parse_frac(v, pos);
  } else {
    value = parse_numeric_literal(v, pos);
    if (value && pos < v.size() && v[pos] == '/') {
      ++pos;
      auto den = parse_numeric_literal(v, pos);
      if (!den) return std::nullopt;
      value = rational_div(*value, *den);
    }
  }
  if (!value || pos != v.size()) return std::nullopt;
  if (negative) value = Rational::make(-value->num, value->den).value();
  return value;
}

// Rewrites every \frac{A}{B} (balanced A and B, arbitrary content) as A/B.
std::string rewrite_frac_syntax(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  auto read_group = [&](std::size_t& p) -> std::optional<std::string_view> {
    if (p >= s.size() || s[p] != '{') return std::nullopt;
    int depth = 0;
    const std::size_t start = p + 1;
    for (std::size_t j = p; j < s.size(); ++j) {
      if (s[j] == '{') ++depth;
      if (s[j] == '}') {
        --depth;
        if (depth == 0) {
          const std::size_t len = j - start;
          p = j + 1;
          return s.substr(start, len);
        }
      }
    }
    return std::nullopt;
  };
  while (i < s.size()) {
    bool matched = false;
    for (std::string_view kw : {"\\frac", "\\dfrac", "\\tfrac"}) {
      if (s.substr(i).starts_with(kw)) {
        std::size_t p = i + kw.size();
        auto a = read_group(p);
        if (a) {
          auto b = read_group(p);
          if (b) {
            out.append(*a);
            out.push_back('/');
            out.append(*b);
            i = p;
            matched = true;
          }
        }
        break;
      }
    }
    if (!matched) {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::string canonicalize_answer(std::string_view raw) {
  std::string_view s = trim(raw);
  while (strip_one_delimiter(s)) s = trim(s);
  return std::string(s);
}

FinalAnswer make_final_answer(std::string_view raw) {
  return FinalAnswer{std::string(raw), canonicalize_answer(raw)};
}

std::optional<FinalAnswer> extract_boxed(std::string_view text) {
  static constexpr std::string_view kMarker = "\\boxed{";
  std::optional<std::string_view> last;
  std::size_t search = 0;
  while (true) {
    const std::size_t at = text.find(kMarker, search);
    if (at == std::string_view::npos) break;
    search = at + 1;
    // Walk the braces; the marker's own '{' opens depth 1.
    int depth = 0;
    const std::size_t open = at + kMarker.size() - 1;
    for (std::size_t j = open; j < text.size(); ++j) {
      if (text[j] == '{') ++depth;
      if (text[j] == '}') {
        --depth;
        if (depth == 0) {
          last = text.substr(open + 1, j - open - 1);
          break;
        }
      }
    }
  }
  if (!last) return std::nullopt;
  return make_final_answer(*last);
}

bool math_equal(const FinalAnswer& a, const FinalAnswer& b) {
  if (a.canonical == b.canonical) return true;
  const std::string sa = remove_whitespace(a.canonical);
  const std::string sb = remove_whitespace(b.canonical);
  if (sa == sb) return true;
  const auto ra = parse_rational(sa);
  const auto rb = parse_rational(sb);
  if (ra && rb) return *ra == *rb;
  if (ra || rb) return false;  // one side is a definite number, the other is not
  return rewrite_frac_syntax(sa) == rewrite_frac_syntax(sb);
}

bool math_equal(std::string_view a, std::string_view b) {
  return math_equal(make_final_answer(a), make_final_answer(b));
}

}  // namespace critloop
