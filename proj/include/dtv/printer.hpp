#pragma once

// Canonical text rendering for the theorem language. Printing then
// re-parsing is the identity on ASTs, and the printed form doubles as the
// deduplication key for formalization attempts.

#include <string>

#include "dtv/ast.hpp"

namespace dtv {

namespace detail {

// Binding strength, loosest to tightest. Atoms (literals, variables,
// parenthesized subterms) sit at the top.
enum Prec { PREC_ADD = 1, PREC_MUL = 2, PREC_UNARY = 3, PREC_POW = 4, PREC_APP = 5, PREC_ATOM = 6 };

inline int expr_prec(const Expr& e) {
  switch (e.op) {
    case ExprOp::Add:
    case ExprOp::Sub: return PREC_ADD;
    case ExprOp::Mul:
    case ExprOp::TrueDiv:
    case ExprOp::IntDiv:
    case ExprOp::Mod: return PREC_MUL;
    case ExprOp::Neg: return PREC_UNARY;
    case ExprOp::Pow:
    case ExprOp::Powr: return PREC_POW;
    case ExprOp::Gcd:
    case ExprOp::Lcm:
    case ExprOp::Fact:
    case ExprOp::Sqrt: return PREC_APP;
    case ExprOp::Lit:
    case ExprOp::Var: return PREC_ATOM;
  }
  return PREC_ATOM;
}

inline std::string print_expr_prec(const ExprPtr& e, int min_prec);

inline std::string parenthesize(const ExprPtr& e, int min_prec) {
  std::string body = print_expr_prec(e, 0);
  // A bare negative literal binds like unary minus, not like an atom.
  bool neg_lit = e->op == ExprOp::Lit && !e->ascription && e->lit < 0;
  if (expr_prec(*e) < min_prec || (neg_lit && min_prec > PREC_UNARY)) return "(" + body + ")";
  return body;
}

inline std::string print_expr_prec(const ExprPtr& e, int min_prec) {
  switch (e->op) {
    case ExprOp::Lit: {
      std::string body = decimal_string(e->lit);
      if (e->ascription) return "(" + body + "::" + type_name(*e->ascription) + ")";
      return body;
    }
    case ExprOp::Var:
      return e->var;
    case ExprOp::Neg:
      return "-" + parenthesize(e->a, PREC_POW);
    case ExprOp::Add:
      return parenthesize(e->a, PREC_ADD) + " + " + parenthesize(e->b, PREC_ADD + 1);
    case ExprOp::Sub:
      return parenthesize(e->a, PREC_ADD) + " - " + parenthesize(e->b, PREC_ADD + 1);
    case ExprOp::Mul:
      return parenthesize(e->a, PREC_MUL) + " * " + parenthesize(e->b, PREC_MUL + 1);
    case ExprOp::TrueDiv:
      return parenthesize(e->a, PREC_MUL) + " / " + parenthesize(e->b, PREC_MUL + 1);
    case ExprOp::IntDiv:
      return parenthesize(e->a, PREC_MUL) + " div " + parenthesize(e->b, PREC_MUL + 1);
    case ExprOp::Mod:
      return parenthesize(e->a, PREC_MUL) + " mod " + parenthesize(e->b, PREC_MUL + 1);
    case ExprOp::Pow:
      return parenthesize(e->a, PREC_ATOM) + "^" + parenthesize(e->b, PREC_ATOM);
    case ExprOp::Powr:
      return parenthesize(e->a, PREC_APP) + " powr " + parenthesize(e->b, PREC_ATOM);
    case ExprOp::Gcd:
      return "gcd " + parenthesize(e->a, PREC_ATOM) + " " + parenthesize(e->b, PREC_ATOM);
    case ExprOp::Lcm:
      return "lcm " + parenthesize(e->a, PREC_ATOM) + " " + parenthesize(e->b, PREC_ATOM);
    case ExprOp::Fact:
      return "fact " + parenthesize(e->a, PREC_ATOM);
    case ExprOp::Sqrt:
      return "sqrt " + parenthesize(e->a, PREC_ATOM);
  }
  return "?";
}

}  // namespace detail

inline std::string print_expr(const ExprPtr& e) { return detail::print_expr_prec(e, 0); }

inline std::string print_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True: return "True";
    case Formula::Kind::False: return "False";
    case Formula::Kind::Compare:
      return print_expr(f.lhs) + " " + cmp_symbol(f.op) + " " + print_expr(f.rhs);
  }
  return "?";
}

inline std::string print_statement(const FormalStatement& stmt) {
  std::string out = "theorem";
  if (stmt.name) out += " " + *stmt.name + ":";

  // Ground one-liners ("theorem \"...\"") stay on a single line.
  if (stmt.fixes.empty() && stmt.assumes.empty())
    return out + " \"" + print_formula(stmt.shows) + "\"";

  out += "\n";
  for (std::size_t i = 0; i < stmt.fixes.size();) {
    std::size_t j = i;
    while (j < stmt.fixes.size() && stmt.fixes[j].second == stmt.fixes[i].second) ++j;
    out += "  fixes";
    for (std::size_t k = i; k < j; ++k) out += " " + stmt.fixes[k].first;
    out += std::string(" :: ") + type_name(stmt.fixes[i].second) + "\n";
    i = j;
  }
  for (std::size_t i = 0; i < stmt.assumes.size(); ++i) {
    out += i == 0 ? "  assumes " : "    and ";
    if (stmt.assumes[i].label) out += *stmt.assumes[i].label + ": ";
    out += "\"" + print_formula(stmt.assumes[i].formula) + "\"\n";
  }
  out += "  shows \"" + print_formula(stmt.shows) + "\"";
  return out;
}

// Debug rendering of a desugared sketch: one goal per line.
inline std::string print_sketch(const SolutionSketch& sketch) {
  std::string out;
  for (std::size_t i = 0; i < sketch.steps.size(); ++i) {
    if (!sketch.steps[i].annotation.empty())
      out += "(* " + sketch.steps[i].annotation + " *)\n";
    out += "step " + std::to_string(i + 1) + ": \"" + print_formula(sketch.steps[i].goal) + "\"\n";
  }
  out += sketch.closes_thesis ? "closes thesis" : "does not close thesis";
  return out;
}

}  // namespace dtv
