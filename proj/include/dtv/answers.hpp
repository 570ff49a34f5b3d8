#pragma once

// Answer extraction and canonicalization. Sampled solutions end with a
// sentence of the form "The final answer is X."; X is pulled out and reduced
// to either an exact rational or a normalized symbolic string so that
// answers can be tallied and compared across samples and against ground
// truth.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>

#include "dtv/core.hpp"
#include "dtv/rational.hpp"

namespace dtv {

enum class AnswerKind { Rational, Symbolic };

struct Answer {
  std::string raw;  // exactly as extracted, wrappers and all
  AnswerKind kind = AnswerKind::Symbolic;
  Rational value;    // meaningful when kind == Rational
  std::string text;  // normalized form when kind == Symbolic
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Words that may trail a numeric answer without changing it.
inline bool is_unit_word(std::string w) {
  for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::array<const char*, 40> units = {
      "gallons", "gallon",  "units",   "unit",   "years",  "year",   "dollars", "dollar",
      "cents",   "cent",    "hours",   "hour",   "minutes", "minute", "days",    "day",
      "weeks",   "week",    "months",  "month",  "miles",  "mile",   "feet",    "foot",
      "inches",  "inch",    "meters",  "meter",  "pounds", "pound",  "ounces",  "ounce",
      "students", "points", "pages",   "page",   "apples", "books",  "degrees", "percent"};
  return std::find(units.begin(), units.end(), w) != units.end();
}

// Removes LaTeX noise that never carries meaning in a final answer: math
// delimiters, \boxed wrappers, spacing commands, escaped currency signs,
// thousands separators.
inline std::string strip_markup(const std::string& input) {
  std::string s = input;

  // \boxed{...} and \text{...} keep their contents.
  for (const char* name : {"\\boxed", "\\text"}) {
    const std::string cmd = name;
    std::size_t at;
    while ((at = s.find(cmd + "{")) != std::string::npos) {
      std::size_t open = at + cmd.size();
      int depth = 0;
      std::size_t close = open;
      for (; close < s.size(); ++close) {
        if (s[close] == '{') ++depth;
        else if (s[close] == '}' && --depth == 0) break;
      }
      if (close >= s.size()) {  // unbalanced; drop just the command name
        s.erase(at, cmd.size());
        continue;
      }
      std::string inner = s.substr(open + 1, close - open - 1);
      s = s.substr(0, at) + inner + s.substr(close + 1);
    }
  }

  // Spacing and decoration commands vanish.
  for (const char* junk : {"\\!", "\\,", "\\;", "\\:", "\\quad", "\\qquad", "\\left", "\\right",
                           "\\$", "\\%", "\\ "}) {
    std::size_t at;
    while ((at = s.find(junk)) != std::string::npos) s.erase(at, std::string(junk).size());
  }

  // Bare math delimiters.
  s.erase(std::remove(s.begin(), s.end(), '$'), s.end());

  // Thousands separators: a comma squeezed between digits.
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1])))
      continue;
    out.push_back(s[i]);
  }
  return out;
}

inline std::string strip_trailing_units(const std::string& input) {
  std::string s = trim(input);
  while (true) {
    std::size_t sp = s.find_last_of(" \t");
    if (sp == std::string::npos) break;
    std::string last = s.substr(sp + 1);
    if (!is_unit_word(last)) break;
    std::string head = trim(s.substr(0, sp));
    if (head.empty()) break;  // never strip the whole answer away
    s = head;
  }
  return s;
}

// \frac{a}{b} (and \dfrac, and the terse \frac12 form) as an exact rational.
inline std::optional<Rational> parse_latex_frac(const std::string& s) {
  std::size_t i = 0;
  bool neg = false;
  while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    if (s[i] == '-') neg = !neg;
    ++i;
  }
  std::size_t at = s.find("frac", i);
  if (at == std::string::npos || at == i || s[i] != '\\') return std::nullopt;
  std::string lead = s.substr(i + 1, at - i - 1);
  if (!(lead.empty() || lead == "d")) return std::nullopt;
  std::size_t pos = at + 4;
  auto grab = [&]() -> std::optional<std::string> {
    if (pos < s.size() && s[pos] == '{') {
      int depth = 0;
      std::size_t close = pos;
      for (; close < s.size(); ++close) {
        if (s[close] == '{') ++depth;
        else if (s[close] == '}' && --depth == 0) break;
      }
      if (close >= s.size()) return std::nullopt;
      std::string inner = s.substr(pos + 1, close - pos - 1);
      pos = close + 1;
      return inner;
    }
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      return std::string(1, s[pos++]);
    return std::nullopt;
  };
  auto num = grab();
  if (!num) return std::nullopt;
  auto den = grab();
  if (!den) return std::nullopt;
  if (pos != s.size()) return std::nullopt;
  auto n = parse_decimal(trim(*num));
  auto d = parse_decimal(trim(*den));
  if (!n || !d || *d == 0) return std::nullopt;
  Rational r = *n / *d;
  return neg ? -r : r;
}

inline std::optional<Rational> parse_numeric(const std::string& cleaned) {
  if (auto direct = parse_decimal(cleaned)) return direct;
  if (auto frac = parse_latex_frac(cleaned)) return frac;
  std::size_t slash = cleaned.find('/');
  if (slash != std::string::npos && cleaned.find('/', slash + 1) == std::string::npos) {
    auto n = parse_decimal(trim(cleaned.substr(0, slash)));
    auto d = parse_decimal(trim(cleaned.substr(slash + 1)));
    if (n && d && *d != 0) return *n / *d;
  }
  return std::nullopt;
}

}  // namespace detail

// Reduces raw answer text to canonical form. Idempotent: canonicalizing a
// canonical rendering yields the same answer.
inline Answer canonicalize(const std::string& raw) {
  Answer a;
  a.raw = detail::trim(raw);

  std::string s = detail::strip_markup(a.raw);
  // The division sign means the same as a slash.
  std::size_t at;
  while ((at = s.find("÷")) != std::string::npos) s.replace(at, 2, "/");
  s = detail::strip_trailing_units(s);
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';' || s.back() == ':'))
    s.pop_back();
  s = detail::trim(s);
  // A trailing percent sign on an otherwise numeric answer is dropped; bare
  // percentages are compared by their stated number.
  if (s.size() > 1 && s.back() == '%') {
    std::string head = detail::trim(s.substr(0, s.size() - 1));
    if (detail::parse_numeric(head)) s = head;
  }

  // A leading plus-or-minus makes the answer inherently symbolic.
  bool plus_minus = s.rfind("\\pm", 0) == 0 || s.rfind("±", 0) == 0;
  if (!plus_minus) {
    if (auto num = detail::parse_numeric(s)) {
      a.kind = AnswerKind::Rational;
      a.value = *num;
      return a;
    }
  }

  a.kind = AnswerKind::Symbolic;
  a.text = s;
  a.text.erase(std::remove_if(a.text.begin(), a.text.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               a.text.end());
  return a;
}

inline std::string canonical_text(const Answer& a) {
  return a.kind == AnswerKind::Rational ? rat_string(a.value) : a.text;
}

inline bool answers_equal(const Answer& a, const Answer& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == AnswerKind::Rational) return a.value == b.value;
  return a.text == b.text;
}

// Total order used for deterministic tie-breaking: rationals first in
// numeric order, then symbolic answers lexicographically.
inline bool answer_less(const Answer& a, const Answer& b) {
  if (a.kind != b.kind) return a.kind == AnswerKind::Rational;
  if (a.kind == AnswerKind::Rational) return a.value < b.value;
  return a.text < b.text;
}

// Locates the final-answer sentence in a sampled solution. The last
// occurrence of the marker wins, matching the convention that models restate
// their answer at the end.
inline Result<Answer> extract_answer(const std::string& solution_text) {
  static const std::string marker = "the final answer is";
  std::string lowered(solution_text);
  for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::size_t at = lowered.rfind(marker);
  if (at == std::string::npos)
    return Error{ErrCode::NoAnswerFound, "no final-answer sentence", std::string::npos};

  std::size_t start = at + marker.size();
  std::size_t end = start;
  for (; end < solution_text.size(); ++end) {
    char c = solution_text[end];
    if (c == '\n' || c == '!' || c == '?') break;
    if (c == '.') {
      // A dot directly followed by a digit is a decimal point, not a period.
      if (end + 1 < solution_text.size() &&
          std::isdigit(static_cast<unsigned char>(solution_text[end + 1])))
        continue;
      break;
    }
  }
  std::string span = detail::trim(solution_text.substr(start, end - start));
  if (!span.empty() && span[0] == ':') span = detail::trim(span.substr(1));
  if (span.empty())
    return Error{ErrCode::NoAnswerFound, "empty answer span", at};
  return canonicalize(span);
}

// Ground-truth fields arrive in dataset-specific shapes: GSM8K ends with
// "#### <answer>", MATH embeds "\boxed{...}" in a worked solution. Both are
// folded into the ordinary canonical form.
inline Answer canonicalize_ground_truth(const std::string& text) {
  std::size_t hashes = text.rfind("####");
  if (hashes != std::string::npos) {
    std::string tail = text.substr(hashes + 4);
    std::size_t nl = tail.find('\n');
    if (nl != std::string::npos) tail = tail.substr(0, nl);
    return canonicalize(detail::trim(tail));
  }
  std::size_t boxed = text.rfind("\\boxed{");
  if (boxed != std::string::npos) {
    int depth = 0;
    std::size_t open = boxed + 6;
    std::size_t close = open;
    for (; close < text.size(); ++close) {
      if (text[close] == '{') ++depth;
      else if (text[close] == '}' && --depth == 0) break;
    }
    if (close < text.size())
      return canonicalize(text.substr(open + 1, close - open - 1));
  }
  return canonicalize(detail::trim(text));
}

}  // namespace dtv
