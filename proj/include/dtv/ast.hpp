#pragma once

// Abstract syntax for the restricted theorem language: arithmetic
// expressions over nat/int/real, flat comparisons, theorem statements
// (fixes / assumes / shows) and proof sketches desugared to a list of step
// goals. Nodes are immutable and shared; copying an expression is a pointer
// copy.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dtv/rational.hpp"

namespace dtv {

enum class BaseType { Nat, Int, Real };

inline const char* type_name(BaseType t) {
  switch (t) {
    case BaseType::Nat: return "nat";
    case BaseType::Int: return "int";
    case BaseType::Real: return "real";
  }
  return "?";
}

inline std::optional<BaseType> type_from_name(const std::string& s) {
  if (s == "nat") return BaseType::Nat;
  if (s == "int") return BaseType::Int;
  if (s == "real") return BaseType::Real;
  return std::nullopt;
}

enum class ExprOp {
  Lit,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  TrueDiv,  // the field division written "/"
  IntDiv,   // "div"
  Mod,      // "mod"
  Pow,      // "^" with a literal exponent
  Powr,     // real exponentiation; parses in sketches, never provable
  Gcd,
  Lcm,
  Fact,
  Sqrt,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprOp op;
  Rational lit;                         // Lit
  std::optional<BaseType> ascription;   // Lit, e.g. (5::nat)
  std::string var;                      // Var
  ExprPtr a;                            // unary operand / left operand
  ExprPtr b;                            // right operand
};

inline ExprPtr mk_lit(Rational v, std::optional<BaseType> asc = std::nullopt) {
  return std::make_shared<Expr>(Expr{ExprOp::Lit, std::move(v), asc, {}, nullptr, nullptr});
}
inline ExprPtr mk_var(std::string name) {
  return std::make_shared<Expr>(Expr{ExprOp::Var, {}, std::nullopt, std::move(name), nullptr, nullptr});
}
inline ExprPtr mk_unary(ExprOp op, ExprPtr a) {
  return std::make_shared<Expr>(Expr{op, {}, std::nullopt, {}, std::move(a), nullptr});
}
inline ExprPtr mk_binary(ExprOp op, ExprPtr a, ExprPtr b) {
  return std::make_shared<Expr>(Expr{op, {}, std::nullopt, {}, std::move(a), std::move(b)});
}

inline bool expr_equal(const ExprPtr& x, const ExprPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->op != y->op) return false;
  switch (x->op) {
    case ExprOp::Lit: return x->lit == y->lit && x->ascription == y->ascription;
    case ExprOp::Var: return x->var == y->var;
    default: return expr_equal(x->a, y->a) && expr_equal(x->b, y->b);
  }
}

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "\\<noteq>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "\\<le>";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return "\\<ge>";
  }
  return "?";
}

struct Formula {
  enum class Kind { Compare, True, False };
  Kind kind = Kind::True;
  CmpOp op = CmpOp::Eq;  // Compare only
  ExprPtr lhs, rhs;

  static Formula truth() { return Formula{Kind::True, CmpOp::Eq, nullptr, nullptr}; }
  static Formula falsity() { return Formula{Kind::False, CmpOp::Eq, nullptr, nullptr}; }
  static Formula compare(CmpOp op, ExprPtr l, ExprPtr r) {
    return Formula{Kind::Compare, op, std::move(l), std::move(r)};
  }
};

inline bool formula_equal(const Formula& x, const Formula& y) {
  if (x.kind != y.kind) return false;
  if (x.kind != Formula::Kind::Compare) return true;
  return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
}

struct Assumption {
  std::optional<std::string> label;
  Formula formula;
};

struct FormalStatement {
  std::optional<std::string> name;
  std::vector<std::pair<std::string, BaseType>> fixes;  // declaration order
  std::vector<Assumption> assumes;
  Formula shows;

  std::map<std::string, BaseType> var_types() const {
    std::map<std::string, BaseType> m;
    for (const auto& [v, t] : fixes) m.emplace(v, t);
    return m;
  }
};

inline bool statement_equal(const FormalStatement& x, const FormalStatement& y) {
  if (x.name != y.name || x.fixes != y.fixes) return false;
  if (x.assumes.size() != y.assumes.size()) return false;
  for (std::size_t i = 0; i < x.assumes.size(); ++i) {
    if (x.assumes[i].label != y.assumes[i].label) return false;
    if (!formula_equal(x.assumes[i].formula, y.assumes[i].formula)) return false;
  }
  return formula_equal(x.shows, y.shows);
}

// The vacuity probe: same hypotheses, goal replaced by False.
inline FormalStatement substitute_goal_false(FormalStatement stmt) {
  stmt.shows = Formula::falsity();
  return stmt;
}

struct SketchStep {
  Formula goal;
  std::string annotation;  // source comments preceding the step, verbatim
};

struct SolutionSketch {
  std::vector<SketchStep> steps;
  bool closes_thesis = false;  // final step targets the statement's goal

  bool empty() const { return steps.empty(); }
};

inline void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->op == ExprOp::Var) {
    out.insert(e->var);
    return;
  }
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

inline void collect_vars(const Formula& f, std::set<std::string>& out) {
  if (f.kind != Formula::Kind::Compare) return;
  collect_vars(f.lhs, out);
  collect_vars(f.rhs, out);
}

inline std::set<std::string> free_vars(const FormalStatement& stmt) {
  std::set<std::string> vars;
  for (const auto& a : stmt.assumes) collect_vars(a.formula, vars);
  collect_vars(stmt.shows, vars);
  return vars;
}

inline bool is_ground(const ExprPtr& e) {
  if (!e) return true;
  if (e->op == ExprOp::Var) return false;
  return is_ground(e->a) && is_ground(e->b);
}

inline bool is_ground(const Formula& f) {
  if (f.kind != Formula::Kind::Compare) return true;
  return is_ground(f.lhs) && is_ground(f.rhs);
}

}  // namespace dtv
