#pragma once

// The built-in prover: an ordered strategy portfolio standing in for an
// interactive assistant's tactic arsenal. First success wins:
//
//   1. ground evaluation   - variable-free goals are computed outright
//   2. hypothesis match    - the goal literally appears among the
//                            hypotheses, modulo commutativity of =, +, *
//   3. linear arithmetic   - negate the goal and decide infeasibility of
//                            the rational relaxation by Fourier-Motzkin
//   4. bounded search      - for small all-nat tasks, brute-force the
//                            negated goal over 0..200 as a safety net; a
//                            counterexample demotes to Unproved
//
// Anything with a nonlinear residue in the goal is Unsupported by name.
// Proved is only ever claimed from an exact decision, never from the
// bounded search alone.

#include <map>
#include <string>
#include <vector>

#include "dtv/ast.hpp"
#include "dtv/core.hpp"
#include "dtv/ground_eval.hpp"
#include "dtv/linear.hpp"
#include "dtv/parser.hpp"
#include "dtv/printer.hpp"

namespace dtv {

struct ProofTask {
  std::vector<Formula> hypotheses;
  Formula goal;
  std::map<std::string, BaseType> var_types;
  std::int64_t budget = 200000;
};

inline ProofTask task_from_statement(const FormalStatement& stmt, std::int64_t budget) {
  ProofTask t;
  for (const auto& a : stmt.assumes) t.hypotheses.push_back(a.formula);
  t.goal = stmt.shows;
  t.var_types = stmt.var_types();
  t.budget = budget;
  return t;
}

enum class ProveStatus { Proved, Unproved, Unsupported, BudgetExhausted };

inline const char* prove_status_name(ProveStatus s) {
  switch (s) {
    case ProveStatus::Proved: return "proved";
    case ProveStatus::Unproved: return "unproved";
    case ProveStatus::Unsupported: return "unsupported";
    case ProveStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "unproved";
}

struct ProveOutcome {
  ProveStatus status = ProveStatus::Unproved;
  // strategy tag when Proved; offending construct when Unsupported
  std::string detail;
};

// ---------------------------------------------------------------------------
// Serialization: the contract for plugging in an external prover. Formulas
// travel as their printed text, which the parser round-trips.

inline void to_json(Json& j, const ProofTask& t) {
  std::vector<std::string> hyps;
  hyps.reserve(t.hypotheses.size());
  for (const auto& h : t.hypotheses) hyps.push_back(print_formula(h));
  std::map<std::string, std::string> vars;
  for (const auto& [v, ty] : t.var_types) vars[v] = type_name(ty);
  j = Json{{"hypotheses", hyps},
           {"goal", print_formula(t.goal)},
           {"var_types", vars},
           {"budget", t.budget}};
}

inline void from_json(const Json& j, ProofTask& t) {
  t.hypotheses.clear();
  for (const auto& h : j.at("hypotheses")) {
    auto f = parse_formula(h.get<std::string>());
    if (!f.ok()) throw std::runtime_error("bad hypothesis: " + f.error().render());
    t.hypotheses.push_back(std::move(f).take());
  }
  auto g = parse_formula(j.at("goal").get<std::string>());
  if (!g.ok()) throw std::runtime_error("bad goal: " + g.error().render());
  t.goal = std::move(g).take();
  t.var_types.clear();
  for (const auto& [v, ty] : j.at("var_types").items()) {
    auto base = type_from_name(ty.get<std::string>());
    if (!base) throw std::runtime_error("bad type for variable " + v);
    t.var_types[v] = *base;
  }
  t.budget = j.at("budget").get<std::int64_t>();
}

inline void to_json(Json& j, const ProveOutcome& o) {
  j = Json{{"status", prove_status_name(o.status)}, {"detail", o.detail}};
}

inline void from_json(const Json& j, ProveOutcome& o) {
  std::string s = j.at("status").get<std::string>();
  if (s == "proved") o.status = ProveStatus::Proved;
  else if (s == "unproved") o.status = ProveStatus::Unproved;
  else if (s == "unsupported") o.status = ProveStatus::Unsupported;
  else if (s == "budget-exhausted") o.status = ProveStatus::BudgetExhausted;
  else throw std::runtime_error("bad prove status: " + s);
  o.detail = j.value("detail", "");
}

// ---------------------------------------------------------------------------
// Strategy 2 support: commutative normalization. Operands of = + * are put
// in printed order; no reassociation, so (a+b)+c and a+(b+c) stay distinct.

namespace detail {

inline ExprPtr normalize_comm(const ExprPtr& e) {
  if (!e) return e;
  ExprPtr a = normalize_comm(e->a);
  ExprPtr b = normalize_comm(e->b);
  if ((e->op == ExprOp::Add || e->op == ExprOp::Mul) && print_expr(a) > print_expr(b))
    std::swap(a, b);
  if (a == e->a && b == e->b) return e;
  auto out = std::make_shared<Expr>(*e);
  out->a = a;
  out->b = b;
  return out;
}

inline std::string comm_key(const Formula& f) {
  if (f.kind != Formula::Kind::Compare) return print_formula(f);
  ExprPtr l = normalize_comm(f.lhs);
  ExprPtr r = normalize_comm(f.rhs);
  if ((f.op == CmpOp::Eq || f.op == CmpOp::Ne) && print_expr(l) > print_expr(r)) std::swap(l, r);
  return print_formula(Formula::compare(f.op, l, r));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The portfolio

namespace detail {

// Counts expression nodes, for budget charges proportional to formula size.
inline std::int64_t expr_size(const ExprPtr& e) {
  if (!e) return 0;
  return 1 + expr_size(e->a) + expr_size(e->b);
}

inline std::int64_t formula_size(const Formula& f) {
  if (f.kind != Formula::Kind::Compare) return 1;
  return 1 + expr_size(f.lhs) + expr_size(f.rhs);
}

struct SearchVerdict {
  bool counterexample = false;
  std::map<std::string, Rational> point;
};

// Brute force over 0..bound per variable, nat semantics, charging one unit
// per point from the main meter. Runs only as confirmation after strategy 3;
// a truncated search therefore leaves Proved standing.
inline SearchVerdict bounded_search(const ProofTask& task, WorkMeter& meter) {
  std::vector<std::string> vars;
  for (const auto& [v, ty] : task.var_types) vars.push_back(v);
  constexpr int kBound = 200;
  constexpr std::int64_t kPointBudget = 4096;

  std::vector<int> point(vars.size(), 0);
  std::map<std::string, Rational> assignment;
  for (;;) {
    if (!meter.spend()) return {};  // truncated: no counterexample found
    assignment.clear();
    for (std::size_t i = 0; i < vars.size(); ++i) assignment[vars[i]] = Rational(point[i]);

    WorkMeter point_meter{kPointBudget};
    bool hyps_hold = true, decidable = true;
    for (const auto& h : task.hypotheses) {
      auto tv = eval_formula(h, task.var_types, point_meter, &assignment);
      if (tv.status == TruthStatus::False) {
        hyps_hold = false;
        break;
      }
      if (tv.status != TruthStatus::True) {
        decidable = false;
        break;
      }
    }
    if (hyps_hold && decidable) {
      auto tv = eval_formula(task.goal, task.var_types, point_meter, &assignment);
      if (tv.status == TruthStatus::False) return {true, assignment};
    }

    // next lexicographic point
    std::size_t i = 0;
    for (; i < point.size(); ++i) {
      if (point[i] < kBound) {
        ++point[i];
        break;
      }
      point[i] = 0;
    }
    if (i == point.size()) return {};  // space exhausted
  }
}

}  // namespace detail

inline ProveOutcome prove(const ProofTask& task) {
  WorkMeter meter{task.budget};
  const auto& vars = task.var_types;

  // (1) ground evaluation
  if (is_ground(task.goal)) {
    auto tv = eval_formula(task.goal, vars, meter);
    if (tv.status == TruthStatus::Budget) return {ProveStatus::BudgetExhausted, {}};
    if (tv.status == TruthStatus::True) return {ProveStatus::Proved, "ground-eval"};
    // A false or unevaluable ground goal may still follow from contradictory
    // hypotheses; let the later strategies look at those.
  }

  // (2) hypothesis match
  {
    if (!meter.spend(detail::formula_size(task.goal))) return {ProveStatus::BudgetExhausted, {}};
    std::string goal_key = detail::comm_key(task.goal);
    for (const auto& h : task.hypotheses) {
      if (!meter.spend(detail::formula_size(h))) return {ProveStatus::BudgetExhausted, {}};
      if (detail::comm_key(h) == goal_key) return {ProveStatus::Proved, "hyp-match"};
    }
  }

  // (3) linear arithmetic over the rational relaxation
  // Hypotheses that do not linearize are dropped: proving from fewer
  // hypotheses is sound. A goal that does not linearize is Unsupported.
  std::vector<std::vector<LinConstraint>> hyp_sets;
  hyp_sets.emplace_back();
  for (const auto& [v, ty] : vars) {
    if (ty != BaseType::Nat) continue;
    LinExpr neg;
    neg.add_term(v, Rational(-1));
    hyp_sets.front().push_back({std::move(neg), LinRel::Le});  // -v <= 0
  }
  for (const auto& h : task.hypotheses) {
    auto fb = linearize_formula(h, vars, meter);
    if (fb.status == LinStatus::Budget) return {ProveStatus::BudgetExhausted, {}};
    if (fb.status == LinStatus::Unsupported) continue;
    if (fb.branches.empty()) continue;  // tautology contributes nothing
    if (hyp_sets.size() * fb.branches.size() > kMaxBranches) continue;  // too wide, drop
    std::vector<std::vector<LinConstraint>> crossed;
    for (const auto& base : hyp_sets)
      for (const auto& add : fb.branches) {
        if (!meter.spend()) return {ProveStatus::BudgetExhausted, {}};
        auto set = base;
        set.insert(set.end(), add.begin(), add.end());
        crossed.push_back(std::move(set));
      }
    hyp_sets = std::move(crossed);
  }

  // An equality goal splits into <= and >=; each direction must hold.
  std::vector<Formula> subgoals;
  if (task.goal.kind == Formula::Kind::Compare && task.goal.op == CmpOp::Eq) {
    subgoals.push_back(Formula::compare(CmpOp::Le, task.goal.lhs, task.goal.rhs));
    subgoals.push_back(Formula::compare(CmpOp::Ge, task.goal.lhs, task.goal.rhs));
  } else {
    subgoals.push_back(task.goal);
  }

  bool all_proved = true;
  for (const auto& sg : subgoals) {
    auto nb = linearize_formula(sg, vars, meter, /*negated=*/true);
    if (nb.status == LinStatus::Budget) return {ProveStatus::BudgetExhausted, {}};
    if (nb.status == LinStatus::Unsupported) return {ProveStatus::Unsupported, nb.detail};
    for (const auto& hs : hyp_sets) {
      for (const auto& gb : nb.branches) {
        if (!meter.spend()) return {ProveStatus::BudgetExhausted, {}};
        std::vector<LinConstraint> cs = hs;
        cs.insert(cs.end(), gb.begin(), gb.end());
        auto verdict = fm_feasible(std::move(cs), meter);
        if (verdict == Feasibility::Budget) return {ProveStatus::BudgetExhausted, {}};
        if (verdict == Feasibility::Feasible) {
          all_proved = false;
          break;
        }
      }
      if (!all_proved) break;
    }
    if (!all_proved) break;
  }

  if (!all_proved) return {ProveStatus::Unproved, {}};

  // (4) bounded search as confirmation on small all-nat tasks
  bool all_nat = !vars.empty() && vars.size() <= 3;
  for (const auto& [v, ty] : vars)
    if (ty != BaseType::Nat) all_nat = false;
  if (all_nat) {
    auto verdict = detail::bounded_search(task, meter);
    if (verdict.counterexample) return {ProveStatus::Unproved, "bounded-search counterexample"};
  }

  return {ProveStatus::Proved, "linear-arith"};
}

// A statement is vacuous when False already follows from its assumptions.
// Only a proof of False discards; anything weaker keeps the statement.
inline bool check_vacuous(const FormalStatement& stmt, std::int64_t budget) {
  ProofTask t = task_from_statement(stmt, budget);
  t.goal = Formula::falsity();
  return prove(t).status == ProveStatus::Proved;
}

// ---------------------------------------------------------------------------
// Interface for swapping in an external prover; the pipeline only sees this.

class ProverBackend {
 public:
  virtual ~ProverBackend() = default;
  virtual ProveOutcome prove_task(const ProofTask& task) = 0;
};

class BuiltinProver : public ProverBackend {
 public:
  ProveOutcome prove_task(const ProofTask& task) override { return prove(task); }
};

}  // namespace dtv
