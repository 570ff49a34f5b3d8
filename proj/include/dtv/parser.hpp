#pragma once

// Lexer and recursive-descent parser for the restricted theorem language.
//
//   theorem [name:] (fixes vars :: type)* (assumes ["φ"] (and ["φ"])*)? shows "φ"
//
// plus proof sketches (proof - ... qed) desugared into a flat list of step
// goals. Constructs of full Isabelle that fall outside this fragment
// (quantifiers, sets, lists, card, tuples, ...) are reported as Unsupported
// with the construct named; malformed input is a ParseError with a byte
// position. Arbitrary bytes must never crash the parser, so every token
// access is bounds-checked and expression nesting is depth-capped.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dtv/ast.hpp"
#include "dtv/core.hpp"
#include "dtv/printer.hpp"

namespace dtv {

namespace lex {

enum class Tok { Ident, Number, Sym, Markup, Comment, End };

struct Token {
  Tok kind;
  std::string text;
  Rational num;  // Number only
  std::size_t pos = 0;
};

inline bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
inline bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }

// Unicode operators tolerated alongside their \<...> escape spellings.
inline bool match_unicode(const std::string& s, std::size_t i, const char* utf8, const char* name,
                          std::vector<Token>& out) {
  std::size_t len = std::string(utf8).size();
  if (s.compare(i, len, utf8) == 0) {
    out.push_back({Tok::Markup, name, {}, i});
    return true;
  }
  return false;
}

inline Result<std::vector<Token>> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    // (* comments *), non-nesting is enough for this corpus
    if (c == '(' && i + 1 < n && s[i + 1] == '*') {
      std::size_t close = s.find("*)", i + 2);
      if (close == std::string::npos) return parse_error("unterminated comment", i);
      std::string body = s.substr(i + 2, close - i - 2);
      std::size_t a = body.find_first_not_of(" \t\r\n");
      std::size_t b = body.find_last_not_of(" \t\r\n");
      out.push_back({Tok::Comment, a == std::string::npos ? "" : body.substr(a, b - a + 1), {}, i});
      i = close + 2;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), {}, i});
      i = j;
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j + 1 < n && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      auto v = parse_decimal(s.substr(i, j - i));
      if (!v) return parse_error("bad numeric literal", i);
      out.push_back({Tok::Number, s.substr(i, j - i), *v, i});
      i = j;
      continue;
    }
    if (c == '\\') {
      if (i + 1 < n && s[i + 1] == '<') {
        std::size_t close = s.find('>', i + 2);
        if (close == std::string::npos) return parse_error("unterminated markup escape", i);
        out.push_back({Tok::Markup, s.substr(i + 2, close - i - 2), {}, i});
        i = close + 1;
        continue;
      }
      return parse_error("stray backslash", i);
    }
    if (c == '?' && i + 1 < n && ident_start(s[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), {}, i});
      i = j;
      continue;
    }
    // multi-byte unicode operators
    if (c >= 0x80) {
      if (match_unicode(s, i, "≤", "le", out) || match_unicode(s, i, "≥", "ge", out) ||
          match_unicode(s, i, "≠", "noteq", out)) {
        i += 3;
        continue;
      }
      if (match_unicode(s, i, "…", "dots", out)) {  // horizontal ellipsis
        i += 3;
        continue;
      }
      if (match_unicode(s, i, "±", "pm", out)) {
        i += 2;
        continue;
      }
      if (match_unicode(s, i, "×", "times", out)) {
        i += 2;
        continue;
      }
      if (match_unicode(s, i, "∀", "forall", out) || match_unicode(s, i, "∃", "exists", out) ||
          match_unicode(s, i, "∈", "in", out)) {
        i += 3;
        continue;
      }
      if (match_unicode(s, i, "∧", "and", out) || match_unicode(s, i, "∨", "or", out)) {
        i += 3;
        continue;
      }
      return parse_error("unexpected character", i);
    }
    auto two = [&](const char* p) { return i + 1 < n && s[i] == p[0] && s[i + 1] == p[1]; };
    if (two("::")) { out.push_back({Tok::Sym, "::", {}, i}); i += 2; continue; }
    if (two("<=")) { out.push_back({Tok::Markup, "le", {}, i}); i += 2; continue; }
    if (two(">=")) { out.push_back({Tok::Markup, "ge", {}, i}); i += 2; continue; }
    if (two("~=") || two("!=")) { out.push_back({Tok::Markup, "noteq", {}, i}); i += 2; continue; }
    if (two("..")) { out.push_back({Tok::Sym, "..", {}, i}); i += 2; continue; }
    if (std::string("+-*/^=<>():,[]{}\".;&|!").find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), {}, i});
      ++i;
      continue;
    }
    return parse_error("unexpected character", i);
  }
  out.push_back({Tok::End, "", {}, n});
  return out;
}

}  // namespace lex

namespace detail {

class Cursor {
 public:
  Cursor(const std::vector<lex::Token>& toks) : toks_(toks) {}

  // Comments are invisible to the statement and formula grammars; the sketch
  // parser reads them explicitly via peek_raw.
  const lex::Token& peek() const {
    std::size_t i = at_;
    while (toks_[i].kind == lex::Tok::Comment) ++i;
    return toks_[i];
  }
  const lex::Token& peek2() const {
    std::size_t i = at_;
    int seen = 0;
    while (true) {
      if (toks_[i].kind != lex::Tok::Comment && seen++ == 1) return toks_[i];
      if (toks_[i].kind == lex::Tok::End) return toks_[i];
      ++i;
    }
  }
  const lex::Token& peek_raw() const { return toks_[at_]; }

  lex::Token next() {
    while (toks_[at_].kind == lex::Tok::Comment) ++at_;
    lex::Token t = toks_[at_];
    if (toks_[at_].kind != lex::Tok::End) ++at_;
    return t;
  }
  lex::Token next_raw() {
    lex::Token t = toks_[at_];
    if (toks_[at_].kind != lex::Tok::End) ++at_;
    return t;
  }

  bool at_ident(const char* word) const {
    return peek().kind == lex::Tok::Ident && peek().text == word;
  }
  bool at_sym(const char* sym) const {
    return peek().kind == lex::Tok::Sym && peek().text == sym;
  }
  bool at_markup(const char* name) const {
    return peek().kind == lex::Tok::Markup && peek().text == name;
  }
  bool eat_ident(const char* word) {
    if (!at_ident(word)) return false;
    next();
    return true;
  }
  bool eat_sym(const char* sym) {
    if (!at_sym(sym)) return false;
    next();
    return true;
  }

 private:
  const std::vector<lex::Token>& toks_;
  std::size_t at_ = 0;
};

// Constructs recognized but deliberately outside the fragment, reported by
// name so failed formalizations are diagnosable.
inline std::optional<std::string> unsupported_construct(const lex::Token& t) {
  if (t.kind == lex::Tok::Markup) {
    static const std::map<std::string, std::string> names = {
        {"forall", "quantifier"},      {"exists", "quantifier"},
        {"in", "set membership"},      {"leftarrow", "list comprehension"},
        {"times", "product type"},     {"Sum", "summation"},
        {"and", "logical connective"}, {"or", "logical connective"},
        {"not", "logical connective"}, {"longrightarrow", "logical connective"},
        {"Rightarrow", "logical connective"}, {"union", "set operation"},
        {"inter", "set operation"},    {"pm", "plus-or-minus"},
    };
    auto it = names.find(t.text);
    if (it != names.end()) return it->second + " \\<" + t.text + ">";
  }
  if (t.kind == lex::Tok::Ident) {
    static const std::set<std::string> funcs = {"card", "sum_list", "prod_list", "prime",
                                                "log",  "ln",       "exp",       "abs",
                                                "floor", "ceiling", "min",       "max",
                                                "sum",  "filter",   "length",    "nth"};
    if (funcs.count(t.text)) return "function '" + t.text + "'";
    if (t.text == "dvd") return "divisibility 'dvd'";
    if (t.text == "if" || t.text == "then" || t.text == "else") return "conditional";
  }
  if (t.kind == lex::Tok::Sym) {
    if (t.text == "{") return "set builder";
    if (t.text == "[") return "list";
    if (t.text == "&" || t.text == "|" || t.text == "!") return "logical connective";
  }
  return std::nullopt;
}

struct FormulaParser {
  Cursor& cur;
  // Substitution for \<dots> in calculation chains; null outside of them.
  ExprPtr dots;
  int depth = 0;

  Result<ExprPtr> atom() {
    if (++depth > 128) return parse_error("expression nesting too deep", cur.peek().pos);
    struct DepthGuard {
      int& d;
      ~DepthGuard() { --d; }
    } guard{depth};

    const lex::Token& t = cur.peek();
    if (auto bad = unsupported_construct(t)) return unsupported(*bad, t.pos);

    if (t.kind == lex::Tok::Number) {
      cur.next();
      return mk_lit(t.num);
    }
    if (t.kind == lex::Tok::Markup && t.text == "dots") {
      if (!dots) return parse_error("\\<dots> outside a calculation chain", t.pos);
      cur.next();
      return dots;
    }
    if (t.kind == lex::Tok::Sym && t.text == "(") {
      std::size_t open_pos = t.pos;
      cur.next();
      auto inner = expr();
      if (!inner) return inner;
      if (cur.at_sym(",")) return unsupported("tuple", cur.peek().pos);
      if (cur.at_sym("::")) {
        cur.next();
        const lex::Token& ty = cur.peek();
        if (ty.kind != lex::Tok::Ident) return parse_error("expected type name", ty.pos);
        auto base = type_from_name(ty.text);
        if (!base) return unsupported("type '" + ty.text + "'", ty.pos);
        cur.next();
        if (!cur.eat_sym(")")) return parse_error("expected ')'", cur.peek().pos);
        const ExprPtr& v = inner.value();
        if (v->op != ExprOp::Lit)
          return unsupported("type ascription on non-literal", open_pos);
        return mk_lit(v->lit, *base);
      }
      if (!cur.eat_sym(")")) return parse_error("expected ')'", cur.peek().pos);
      return std::move(inner).take();
    }
    if (t.kind == lex::Tok::Ident) {
      if (t.text == "gcd" || t.text == "lcm") {
        ExprOp op = t.text == "gcd" ? ExprOp::Gcd : ExprOp::Lcm;
        cur.next();
        auto a = atom();
        if (!a) return a;
        auto b = atom();
        if (!b) return b;
        return mk_binary(op, std::move(a).take(), std::move(b).take());
      }
      if (t.text == "fact" || t.text == "sqrt") {
        ExprOp op = t.text == "fact" ? ExprOp::Fact : ExprOp::Sqrt;
        cur.next();
        auto a = atom();
        if (!a) return a;
        return mk_unary(op, std::move(a).take());
      }
      cur.next();
      return mk_var(t.text);
    }
    return parse_error("expected expression, found '" + t.text + "'", t.pos);
  }

  Result<ExprPtr> power() {
    auto base = atom();
    if (!base) return base;
    if (cur.at_sym("^")) {
      std::size_t pos = cur.peek().pos;
      cur.next();
      bool negated = cur.eat_sym("-");
      auto exp = atom();
      if (!exp) return exp;
      const ExprPtr& e = exp.value();
      if (e->op != ExprOp::Lit) return unsupported("non-literal exponent", pos);
      if (negated) return unsupported("negative exponent", pos);
      if (!is_nonneg_integer(e->lit)) return unsupported("non-integer exponent", pos);
      return mk_binary(ExprOp::Pow, std::move(base).take(), std::move(exp).take());
    }
    if (cur.at_ident("powr")) {
      cur.next();
      auto exp = atom();
      if (!exp) return exp;
      return mk_binary(ExprOp::Powr, std::move(base).take(), std::move(exp).take());
    }
    return base;
  }

  Result<ExprPtr> unary() {
    if (++depth > 128) return parse_error("expression nesting too deep", cur.peek().pos);
    struct DepthGuard {
      int& d;
      ~DepthGuard() { --d; }
    } guard{depth};
    if (cur.at_sym("-")) {
      cur.next();
      auto inner = unary();
      if (!inner) return inner;
      return mk_unary(ExprOp::Neg, std::move(inner).take());
    }
    return power();
  }

  Result<ExprPtr> product() {
    auto acc = unary();
    if (!acc) return acc;
    while (true) {
      ExprOp op;
      if (cur.at_sym("*")) op = ExprOp::Mul;
      else if (cur.at_sym("/")) op = ExprOp::TrueDiv;
      else if (cur.at_ident("div")) op = ExprOp::IntDiv;
      else if (cur.at_ident("mod")) op = ExprOp::Mod;
      else if (cur.at_ident("dvd")) return unsupported("divisibility 'dvd'", cur.peek().pos);
      else break;
      cur.next();
      auto rhs = unary();
      if (!rhs) return rhs;
      acc = mk_binary(op, std::move(acc).take(), std::move(rhs).take());
    }
    return acc;
  }

  Result<ExprPtr> expr() {
    auto acc = product();
    if (!acc) return acc;
    while (cur.at_sym("+") || cur.at_sym("-")) {
      ExprOp op = cur.peek().text == "+" ? ExprOp::Add : ExprOp::Sub;
      cur.next();
      auto rhs = product();
      if (!rhs) return rhs;
      acc = mk_binary(op, std::move(acc).take(), std::move(rhs).take());
    }
    return acc;
  }

  Result<Formula> formula() {
    if (cur.at_ident("True") && ends_formula(cur.peek2())) {
      cur.next();
      return Formula::truth();
    }
    if (cur.at_ident("False") && ends_formula(cur.peek2())) {
      cur.next();
      return Formula::falsity();
    }
    if (auto bad = unsupported_construct(cur.peek())) return unsupported(*bad, cur.peek().pos);

    auto lhs = expr();
    if (!lhs) return lhs.error();

    CmpOp op;
    const lex::Token& t = cur.peek();
    if (t.kind == lex::Tok::Sym && t.text == "=") op = CmpOp::Eq;
    else if (t.kind == lex::Tok::Sym && t.text == "<") op = CmpOp::Lt;
    else if (t.kind == lex::Tok::Sym && t.text == ">") op = CmpOp::Gt;
    else if (t.kind == lex::Tok::Markup && t.text == "le") op = CmpOp::Le;
    else if (t.kind == lex::Tok::Markup && t.text == "ge") op = CmpOp::Ge;
    else if (t.kind == lex::Tok::Markup && t.text == "noteq") op = CmpOp::Ne;
    else if (auto bad = unsupported_construct(t)) return unsupported(*bad, t.pos);
    else return parse_error("expected comparison operator", t.pos);
    cur.next();

    auto rhs = expr();
    if (!rhs) return rhs.error();

    const lex::Token& after = cur.peek();
    bool chained = (after.kind == lex::Tok::Sym &&
                    (after.text == "=" || after.text == "<" || after.text == ">")) ||
                   (after.kind == lex::Tok::Markup &&
                    (after.text == "le" || after.text == "ge" || after.text == "noteq"));
    if (chained) return unsupported("chained comparison", after.pos);

    return Formula::compare(op, std::move(lhs).take(), std::move(rhs).take());
  }

  static bool ends_formula(const lex::Token& t) {
    return t.kind == lex::Tok::End || (t.kind == lex::Tok::Sym && t.text == "\"");
  }
};

// Parses the quoted formula the cursor is standing on.
inline Result<Formula> quoted_formula(Cursor& cur, ExprPtr dots = nullptr) {
  if (!cur.eat_sym("\"")) return parse_error("expected '\"'", cur.peek().pos);
  FormulaParser fp{cur, std::move(dots)};
  auto f = fp.formula();
  if (!f) return f;
  if (!cur.eat_sym("\"")) {
    const lex::Token& t = cur.peek();
    if (auto bad = unsupported_construct(t)) return unsupported(*bad, t.pos);
    return parse_error("expected closing '\"', found '" + t.text + "'", t.pos);
  }
  return f;
}

inline bool is_statement_keyword(const std::string& w) {
  return w == "fixes" || w == "assumes" || w == "shows" || w == "and" || w == "theorem";
}

inline bool is_step_keyword(const std::string& w) {
  static const std::set<std::string> kw = {
      "have", "hence", "thus", "show", "then", "also", "finally", "qed",
      "proof", "next", "moreover", "ultimately", "obtain", "case",
      "assume", "fix", "let", "define"};
  return kw.count(w) > 0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standalone formulas (used by serialized proof tasks)

inline Result<Formula> parse_formula(const std::string& text) {
  auto toks = lex::tokenize(text);
  if (!toks) return toks.error();
  detail::Cursor cur(toks.value());
  detail::FormulaParser fp{cur, nullptr};
  auto f = fp.formula();
  if (!f) return f;
  if (cur.peek().kind != lex::Tok::End)
    return parse_error("unexpected trailing input '" + cur.peek().text + "'", cur.peek().pos);
  return f;
}

// ---------------------------------------------------------------------------
// Statements

inline Result<FormalStatement> parse_statement(const std::string& text) {
  auto toks = lex::tokenize(text);
  if (!toks) return toks.error();
  detail::Cursor cur(toks.value());

  if (!cur.eat_ident("theorem")) return parse_error("expected 'theorem'", cur.peek().pos);

  FormalStatement stmt;
  if (cur.peek().kind == lex::Tok::Ident && !detail::is_statement_keyword(cur.peek().text) &&
      cur.peek2().kind == lex::Tok::Sym && cur.peek2().text == ":") {
    stmt.name = cur.next().text;
    cur.next();  // ':'
  }

  // Ground one-liner: theorem "φ"
  if (cur.at_sym("\"")) {
    auto f = detail::quoted_formula(cur);
    if (!f) return f.error();
    stmt.shows = std::move(f).take();
  } else {
    while (cur.eat_ident("fixes")) {
      std::vector<std::string> names;
      while (cur.peek().kind == lex::Tok::Ident && !detail::is_statement_keyword(cur.peek().text) &&
             !(cur.peek2().kind == lex::Tok::Sym && cur.peek2().text == "\"")) {
        if (cur.at_sym("::")) break;
        names.push_back(cur.next().text);
      }
      if (!cur.eat_sym("::")) return parse_error("expected '::' after fixed variables", cur.peek().pos);
      const lex::Token& ty = cur.peek();
      if (ty.kind != lex::Tok::Ident) return parse_error("expected type name", ty.pos);
      auto base = type_from_name(ty.text);
      if (!base) return unsupported("type '" + ty.text + "'", ty.pos);
      cur.next();
      if (names.empty()) return parse_error("'fixes' declares no variables", ty.pos);
      for (const auto& v : names) {
        for (const auto& [seen, t] : stmt.fixes)
          if (seen == v) return parse_error("duplicate variable '" + v + "'", ty.pos);
        stmt.fixes.emplace_back(v, *base);
      }
    }

    while (cur.at_ident("assumes")) {
      cur.next();
      bool first = true;
      while (first || cur.eat_ident("and")) {
        first = false;
        Assumption a;
        if (cur.peek().kind == lex::Tok::Ident && cur.peek2().kind == lex::Tok::Sym &&
            cur.peek2().text == ":") {
          a.label = cur.next().text;
          cur.next();  // ':'
        }
        auto f = detail::quoted_formula(cur);
        if (!f) return f.error();
        a.formula = std::move(f).take();
        stmt.assumes.push_back(std::move(a));
      }
    }

    if (!cur.eat_ident("shows"))
      return parse_error("expected 'shows', found '" + cur.peek().text + "'", cur.peek().pos);
    auto f = detail::quoted_formula(cur);
    if (!f) return f.error();
    stmt.shows = std::move(f).take();
  }

  // Anything after the statement must be a proof block (tolerated and left
  // for parse_sketch) or nothing.
  if (cur.peek().kind != lex::Tok::End && !cur.at_ident("proof"))
    return parse_error("unexpected trailing input '" + cur.peek().text + "'", cur.peek().pos);

  // Every variable must be declared.
  auto declared = stmt.var_types();
  for (const auto& v : free_vars(stmt))
    if (!declared.count(v)) return unsupported("unbound variable '" + v + "'");

  return stmt;
}

// ---------------------------------------------------------------------------
// Proof sketches

inline Result<SolutionSketch> parse_sketch(const std::string& text, const FormalStatement& stmt) {
  auto toks = lex::tokenize(text);
  if (!toks) return toks.error();
  detail::Cursor cur(toks.value());

  // Skip an optional restatement of the theorem; find the proof block.
  bool saw_any = false;
  while (!cur.at_ident("proof") && cur.peek().kind != lex::Tok::End) {
    saw_any = true;
    cur.next();
  }
  if (cur.peek().kind == lex::Tok::End) {
    if (saw_any) return parse_error("no proof block found");
    return SolutionSketch{};  // empty sketch: statement-only verification
  }
  cur.next();  // 'proof'
  if (!cur.eat_sym("-")) {
    if (cur.at_sym("("))
      return unsupported("structured proof method", cur.peek().pos);
    return parse_error("expected '-' after 'proof'", cur.peek().pos);
  }

  SolutionSketch sketch;
  // Calculation-chain state: the formula of the step a chain started from,
  // and the most recent step formula (whose rhs \<dots> refers to).
  std::optional<Formula> chain_start;
  std::optional<Formula> prev_step;
  bool ended = false;
  bool thesis_closed = false;

  auto at_step_keyword = [&]() {
    if (cur.peek_raw().kind == lex::Tok::Comment) return true;
    const lex::Token& t = cur.peek();
    return t.kind == lex::Tok::Ident && detail::is_step_keyword(t.text);
  };

  auto discard_justification = [&]() -> Result<bool> {
    while (true) {
      if (cur.at_ident("using") || cur.at_ident("unfolding")) {
        cur.next();
        // fact names, possibly with selectors like assms(1)
        bool any = false;
        while (cur.peek().kind == lex::Tok::Ident &&
               !detail::is_statement_keyword(cur.peek().text) && !at_step_keyword()) {
          cur.next();
          any = true;
          if (cur.at_sym("(")) {
            int d = 1;
            cur.next();
            while (d > 0 && cur.peek().kind != lex::Tok::End) {
              if (cur.at_sym("(")) ++d;
              if (cur.at_sym(")")) --d;
              cur.next();
            }
          }
        }
        if (!any) return parse_error("expected fact name", cur.peek().pos);
        continue;
      }
      if (cur.at_ident("by")) {
        cur.next();
        if (cur.at_sym("(")) {
          int d = 1;
          cur.next();
          while (d > 0 && cur.peek().kind != lex::Tok::End) {
            if (cur.at_sym("(")) ++d;
            if (cur.at_sym(")")) --d;
            cur.next();
          }
          if (cur.at_sym("[")) {  // e.g. by (simp)[1]
            cur.next();
            while (!cur.at_sym("]") && cur.peek().kind != lex::Tok::End) cur.next();
            cur.eat_sym("]");
          }
          continue;
        }
        if (cur.peek().kind == lex::Tok::Ident) {
          cur.next();
          // method arguments like "simp add: foo bar" up to the next step
          while (cur.peek().kind != lex::Tok::End && !at_step_keyword() &&
                 !cur.at_sym("[") &&
                 (cur.peek().kind == lex::Tok::Ident || cur.at_sym(":") || cur.at_sym("(") ||
                  cur.peek().kind == lex::Tok::Number)) {
            if (cur.at_sym("(")) {
              int d = 1;
              cur.next();
              while (d > 0 && cur.peek().kind != lex::Tok::End) {
                if (cur.at_sym("(")) ++d;
                if (cur.at_sym(")")) --d;
                cur.next();
              }
            } else {
              cur.next();
            }
          }
          continue;
        }
        if (cur.at_sym("-")) {  // "by -" is legal if pointless
          cur.next();
          continue;
        }
        return parse_error("expected proof method after 'by'", cur.peek().pos);
      }
      if (cur.at_ident("sledgehammer")) {
        cur.next();
        continue;
      }
      if (cur.at_sym(".") || cur.at_sym("..")) {
        cur.next();
        continue;
      }
      if (cur.at_sym("[")) {  // trailing tool tags like [ATP]
        cur.next();
        while (!cur.at_sym("]") && cur.peek().kind != lex::Tok::End) cur.next();
        if (!cur.eat_sym("]")) return parse_error("unterminated '['", cur.peek().pos);
        continue;
      }
      return true;
    }
  };

  while (true) {
    // Comments become the informal annotation of the following step.
    std::string annotation;
    while (cur.peek_raw().kind == lex::Tok::Comment) {
      if (!annotation.empty()) annotation += "\n";
      annotation += cur.next_raw().text;
    }

    const lex::Token& t = cur.peek();
    if (t.kind == lex::Tok::End) return parse_error("missing 'qed'", t.pos);

    if (cur.eat_ident("qed")) {
      if (sketch.steps.empty()) return parse_error("empty proof body", t.pos);
      while (cur.peek().kind != lex::Tok::End) {
        if (cur.peek_raw().kind == lex::Tok::Comment) {
          cur.next_raw();
          continue;
        }
        return parse_error("unexpected input after 'qed'", cur.peek().pos);
      }
      sketch.closes_thesis = thesis_closed;
      return sketch;
    }

    if (ended) return parse_error("proof continues after 'show'", t.pos);

    for (const char* bad : {"obtain", "case", "assume", "fix", "let", "define", "induct",
                            "moreover", "ultimately", "next"})
      if (cur.at_ident(bad)) return unsupported(std::string("'") + bad + "'", t.pos);
    if (cur.at_ident("proof")) return unsupported("nested proof", t.pos);

    bool then_prefix = cur.eat_ident("then");
    bool is_also = false, is_finally = false;
    if (!then_prefix) {
      is_also = cur.eat_ident("also");
      if (!is_also) is_finally = cur.eat_ident("finally");
    }

    bool is_have = cur.eat_ident("have");
    bool is_show = false;
    if (!is_have) {
      if (cur.eat_ident("hence")) is_have = true;
      else if (cur.eat_ident("thus")) is_show = true;
      else if (cur.eat_ident("show")) is_show = true;
      else {
        if (auto bad = detail::unsupported_construct(cur.peek()))
          return unsupported(*bad, cur.peek().pos);
        return parse_error("expected proof step, found '" + cur.peek().text + "'", cur.peek().pos);
      }
    }
    if ((is_also || is_finally) && !is_have && !is_show)
      return parse_error("expected 'have' or 'show'", cur.peek().pos);

    // Calculation bookkeeping: 'also'/'finally' continue a chain whose start
    // is the step preceding the first 'also'.
    ExprPtr dots;
    if (is_also || is_finally) {
      if (!prev_step) return parse_error("'also' with no preceding step", t.pos);
      if (prev_step->kind != Formula::Kind::Compare)
        return unsupported("calculation over non-comparison", t.pos);
      if (!chain_start) {
        if (prev_step->op != CmpOp::Eq)
          return unsupported("calculation over non-equalities", t.pos);
        chain_start = *prev_step;
      }
      dots = prev_step->rhs;
    }

    if (is_finally) {
      // The chain collapses to: first lhs = last rhs.
      Formula trans = Formula::compare(CmpOp::Eq, chain_start->lhs, prev_step->rhs);
      sketch.steps.push_back({trans, annotation});
      annotation.clear();
      prev_step = trans;
      chain_start.reset();
    }

    // Step labels ("have c0: ...") only matter to the justifications we
    // discard, so they are skipped.
    if (cur.peek().kind == lex::Tok::Ident && !cur.at_ident("?thesis") &&
        cur.peek2().kind == lex::Tok::Sym && cur.peek2().text == ":") {
      cur.next();
      cur.next();
    }

    Formula goal;
    if (is_show && cur.at_ident("?thesis")) {
      cur.next();
      goal = stmt.shows;
    } else {
      auto f = detail::quoted_formula(cur, dots);
      if (!f) return f.error();
      goal = std::move(f).take();
      if (is_also && (goal.kind != Formula::Kind::Compare || goal.op != CmpOp::Eq))
        return unsupported("calculation over non-equalities", t.pos);
    }

    auto skip = discard_justification();
    if (!skip) return skip.error();

    // A 'finally show' whose thesis coincides with the just-emitted
    // transitivity goal would duplicate it; keep the single step.
    bool duplicate = is_finally && !sketch.steps.empty() &&
                     formula_equal(goal, sketch.steps.back().goal);
    if (!duplicate) sketch.steps.push_back({goal, annotation});
    prev_step = sketch.steps.back().goal;

    if (is_show) {
      ended = true;
      thesis_closed = formula_equal(goal, stmt.shows);
    }
  }
}

}  // namespace dtv
