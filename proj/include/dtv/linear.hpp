#pragma once

// Linear arithmetic over exact rationals: translating formulas into linear
// constraints (with case splits for truncating nat subtraction) and deciding
// infeasibility of a constraint system by Gaussian substitution of the
// equalities followed by Fourier-Motzkin elimination. Both phases charge the
// work meter so pathological systems degrade to a budget verdict instead of
// hanging.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "dtv/ast.hpp"
#include "dtv/ground_eval.hpp"

namespace dtv {

// sum of coeff * var + constant
struct LinExpr {
  std::map<std::string, Rational> coeffs;
  Rational constant;

  bool is_constant() const { return coeffs.empty(); }

  void add_term(const std::string& var, const Rational& c) {
    auto it = coeffs.find(var);
    if (it == coeffs.end()) {
      if (c != 0) coeffs.emplace(var, c);
      return;
    }
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
  }

  LinExpr& operator+=(const LinExpr& o) {
    for (const auto& [v, c] : o.coeffs) add_term(v, c);
    constant += o.constant;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (const auto& [v, c] : o.coeffs) add_term(v, -c);
    constant -= o.constant;
    return *this;
  }
  void scale(const Rational& k) {
    if (k == 0) {
      coeffs.clear();
      constant = 0;
      return;
    }
    for (auto& [v, c] : coeffs) c *= k;
    constant *= k;
  }

  static LinExpr of_constant(Rational c) {
    LinExpr e;
    e.constant = std::move(c);
    return e;
  }
  static LinExpr of_var(const std::string& v) {
    LinExpr e;
    e.coeffs.emplace(v, Rational(1));
    return e;
  }
};

// expr REL 0
enum class LinRel { Eq, Le, Lt };

struct LinConstraint {
  LinExpr expr;
  LinRel rel = LinRel::Le;
};

enum class LinStatus { Ok, Unsupported, Budget };

// One branch of a case split: the linear form an expression takes, valid
// under the extra constraints accumulated while building it.
struct LinBranch {
  LinExpr form;
  std::vector<LinConstraint> side;
};

struct LinResult {
  LinStatus status = LinStatus::Ok;
  std::vector<LinBranch> branches;
  std::string detail;

  static LinResult fail(std::string what) { return {LinStatus::Unsupported, {}, std::move(what)}; }
  static LinResult budget() { return {LinStatus::Budget, {}, {}}; }
};

inline constexpr int kMaxNatSubSplits = 4;
inline constexpr std::size_t kMaxBranches = 64;

namespace detail {

struct Linearizer {
  BaseType ty;
  WorkMeter& meter;
  const std::map<std::string, Rational>* assignment = nullptr;
  int nat_sub_splits = 0;

  LinResult run(const ExprPtr& e) {
    if (!meter.spend()) return LinResult::budget();
    // a variable-free subtree folds to its exact value
    if (is_ground(e)) {
      auto v = eval_expr(e, ty, meter, assignment);
      if (v.status == EvalStatus::Budget) return LinResult::budget();
      if (v.status == EvalStatus::Unsupported) return LinResult::fail(v.detail);
      LinResult r;
      r.branches.push_back({LinExpr::of_constant(v.value), {}});
      return r;
    }
    switch (e->op) {
      case ExprOp::Var: {
        LinResult r;
        r.branches.push_back({LinExpr::of_var(e->var), {}});
        return r;
      }
      case ExprOp::Neg: {
        if (ty == BaseType::Nat) {
          // -n collapses to 0 over nat
          LinResult r;
          r.branches.push_back({LinExpr::of_constant(Rational(0)), {}});
          return r;
        }
        auto a = run(e->a);
        if (a.status != LinStatus::Ok) return a;
        for (auto& br : a.branches) br.form.scale(Rational(-1));
        return a;
      }
      case ExprOp::Add:
        return combine(e, [](LinExpr l, const LinExpr& r) {
          l += r;
          return LinResult{LinStatus::Ok, {{std::move(l), {}}}, {}};
        });
      case ExprOp::Sub:
        if (ty == BaseType::Nat) return nat_sub(e);
        return combine(e, [](LinExpr l, const LinExpr& r) {
          l -= r;
          return LinResult{LinStatus::Ok, {{std::move(l), {}}}, {}};
        });
      case ExprOp::Mul:
        return combine(e, [](const LinExpr& l, const LinExpr& r) {
          if (l.is_constant()) {
            LinExpr out = r;
            out.scale(l.constant);
            return LinResult{LinStatus::Ok, {{std::move(out), {}}}, {}};
          }
          if (r.is_constant()) {
            LinExpr out = l;
            out.scale(r.constant);
            return LinResult{LinStatus::Ok, {{std::move(out), {}}}, {}};
          }
          return LinResult::fail("nonlinear product");
        });
      case ExprOp::TrueDiv: {
        if (ty != BaseType::Real)
          return LinResult::fail("field division in " + std::string(type_name(ty)) + " context");
        return combine(e, [](const LinExpr& l, const LinExpr& r) {
          if (!r.is_constant()) return LinResult::fail("division by a variable expression");
          LinExpr out = l;
          if (r.constant == 0)
            out = LinExpr::of_constant(Rational(0));  // x / 0 = 0
          else
            out.scale(Rational(1) / r.constant);
          return LinResult{LinStatus::Ok, {{std::move(out), {}}}, {}};
        });
      }
      case ExprOp::Pow: {
        if (!e->b || e->b->op != ExprOp::Lit || !is_nonneg_integer(e->b->lit))
          return LinResult::fail("non-literal exponent");
        BigInt exp = numerator(e->b->lit);
        if (exp == 0) {
          LinResult r;
          r.branches.push_back({LinExpr::of_constant(Rational(1)), {}});
          return r;
        }
        if (exp == 1) return run(e->a);
        return LinResult::fail("nonlinear power");
      }
      case ExprOp::IntDiv: return LinResult::fail("div of a variable expression");
      case ExprOp::Mod: return LinResult::fail("mod of a variable expression");
      case ExprOp::Gcd: return LinResult::fail("gcd of a variable expression");
      case ExprOp::Lcm: return LinResult::fail("lcm of a variable expression");
      case ExprOp::Fact: return LinResult::fail("factorial of a variable expression");
      case ExprOp::Sqrt: return LinResult::fail("sqrt of a variable expression");
      case ExprOp::Powr: return LinResult::fail("powr");
      case ExprOp::Lit: break;  // handled by the ground fold
    }
    return LinResult::fail("unknown operator");
  }

  template <typename F>
  LinResult combine(const ExprPtr& e, F merge) {
    auto a = run(e->a);
    if (a.status != LinStatus::Ok) return a;
    auto b = run(e->b);
    if (b.status != LinStatus::Ok) return b;
    LinResult out;
    for (const auto& ba : a.branches)
      for (const auto& bb : b.branches) {
        if (!meter.spend()) return LinResult::budget();
        auto merged = merge(ba.form, bb.form);
        if (merged.status != LinStatus::Ok) return merged;
        for (auto& br : merged.branches) {
          br.side.insert(br.side.begin(), ba.side.begin(), ba.side.end());
          br.side.insert(br.side.end(), bb.side.begin(), bb.side.end());
          out.branches.push_back(std::move(br));
        }
        if (out.branches.size() > kMaxBranches) return LinResult::fail("too many case splits");
      }
    return out;
  }

  // a - b over nat: either a >= b and the value is a - b, or a <= b and the
  // value is 0. The overlap at a = b is harmless (both give the same value).
  LinResult nat_sub(const ExprPtr& e) {
    if (++nat_sub_splits > kMaxNatSubSplits)
      return LinResult::fail("too many truncating subtractions");
    auto a = run(e->a);
    if (a.status != LinStatus::Ok) return a;
    auto b = run(e->b);
    if (b.status != LinStatus::Ok) return b;
    LinResult out;
    for (const auto& ba : a.branches)
      for (const auto& bb : b.branches) {
        if (!meter.spend()) return LinResult::budget();
        LinExpr diff = ba.form;
        diff -= bb.form;

        LinBranch ge;  // a >= b, value a - b
        ge.form = diff;
        ge.side = ba.side;
        ge.side.insert(ge.side.end(), bb.side.begin(), bb.side.end());
        LinExpr neg = diff;
        neg.scale(Rational(-1));
        ge.side.push_back({std::move(neg), LinRel::Le});  // b - a <= 0

        LinBranch le;  // a <= b, value 0
        le.form = LinExpr::of_constant(Rational(0));
        le.side = ba.side;
        le.side.insert(le.side.end(), bb.side.begin(), bb.side.end());
        le.side.push_back({diff, LinRel::Le});  // a - b <= 0

        out.branches.push_back(std::move(ge));
        out.branches.push_back(std::move(le));
        if (out.branches.size() > kMaxBranches) return LinResult::fail("too many case splits");
      }
    return out;
  }
};

}  // namespace detail

// A formula as alternative constraint sets: the formula holds iff some
// branch's constraints all hold. Most formulas produce one branch; nat
// subtraction and negated equalities fan out.
struct FormulaBranches {
  LinStatus status = LinStatus::Ok;
  std::vector<std::vector<LinConstraint>> branches;
  std::string detail;
};

inline CmpOp negate_cmp(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

inline FormulaBranches linearize_formula(const Formula& f,
                                         const std::map<std::string, BaseType>& vars,
                                         WorkMeter& meter, bool negated = false) {
  FormulaBranches out;
  bool truth;
  if (f.kind == Formula::Kind::True) truth = !negated;
  else if (f.kind == Formula::Kind::False) truth = negated;
  else truth = true;  // placate the compiler; unused for compares
  if (f.kind != Formula::Kind::Compare) {
    if (truth) {
      out.branches.push_back({});  // no constraints: always holds
    } else {
      std::vector<LinConstraint> impossible;
      impossible.push_back({LinExpr::of_constant(Rational(1)), LinRel::Le});  // 1 <= 0
      out.branches.push_back(std::move(impossible));
    }
    return out;
  }

  BaseType ty = infer_type(f, vars);
  detail::Linearizer lin{ty, meter};
  auto l = lin.run(f.lhs);
  if (l.status == LinStatus::Budget) return {LinStatus::Budget, {}, {}};
  if (l.status == LinStatus::Unsupported) return {LinStatus::Unsupported, {}, l.detail};
  auto r = lin.run(f.rhs);
  if (r.status == LinStatus::Budget) return {LinStatus::Budget, {}, {}};
  if (r.status == LinStatus::Unsupported) return {LinStatus::Unsupported, {}, r.detail};

  CmpOp op = negated ? negate_cmp(f.op) : f.op;
  for (const auto& bl : l.branches)
    for (const auto& br : r.branches) {
      if (!meter.spend()) return {LinStatus::Budget, {}, {}};
      LinExpr diff = bl.form;
      diff -= br.form;
      std::vector<LinConstraint> side = bl.side;
      side.insert(side.end(), br.side.begin(), br.side.end());

      auto emit = [&](LinExpr e, LinRel rel) {
        auto set = side;
        set.push_back({std::move(e), rel});
        out.branches.push_back(std::move(set));
      };
      LinExpr neg = diff;
      neg.scale(Rational(-1));
      switch (op) {
        case CmpOp::Eq: emit(diff, LinRel::Eq); break;
        case CmpOp::Le: emit(diff, LinRel::Le); break;
        case CmpOp::Lt: emit(diff, LinRel::Lt); break;
        case CmpOp::Ge: emit(neg, LinRel::Le); break;
        case CmpOp::Gt: emit(neg, LinRel::Lt); break;
        case CmpOp::Ne:
          emit(diff, LinRel::Lt);  // lhs < rhs, or
          emit(neg, LinRel::Lt);   // lhs > rhs
          break;
      }
      if (out.branches.size() > kMaxBranches)
        return {LinStatus::Unsupported, {}, "too many case splits"};
    }
  return out;
}

enum class Feasibility { Infeasible, Feasible, Budget };

// Decides whether a conjunction of linear constraints has a rational
// solution. Equalities are eliminated by substitution first, then variables
// are eliminated one at a time by combining upper and lower bounds.
// Fourier-Motzkin is complete over the rationals, so "Feasible" is exact.
inline Feasibility fm_feasible(std::vector<LinConstraint> cs, WorkMeter& meter) {
  auto constant_violated = [](const LinConstraint& c) {
    if (!c.expr.is_constant()) return false;
    switch (c.rel) {
      case LinRel::Eq: return c.expr.constant != 0;
      case LinRel::Le: return c.expr.constant > 0;
      case LinRel::Lt: return c.expr.constant >= 0;
    }
    return false;
  };

  // substitute equalities away
  for (;;) {
    if (!meter.spend()) return Feasibility::Budget;
    std::size_t eq_idx = cs.size();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].rel == LinRel::Eq && !cs[i].expr.is_constant()) {
        eq_idx = i;
        break;
      }
    }
    if (eq_idx == cs.size()) break;
    LinConstraint eq = std::move(cs[eq_idx]);
    cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(eq_idx));
    // solve for the first variable: v = -(rest)/coeff
    auto [var, coeff] = *eq.expr.coeffs.begin();
    LinExpr sol = eq.expr;
    sol.coeffs.erase(var);
    sol.scale(Rational(-1) / coeff);
    for (auto& c : cs) {
      auto it = c.expr.coeffs.find(var);
      if (it == c.expr.coeffs.end()) continue;
      if (!meter.spend()) return Feasibility::Budget;
      Rational k = it->second;
      c.expr.coeffs.erase(it);
      LinExpr scaled = sol;
      scaled.scale(k);
      c.expr += scaled;
      if (constant_violated(c)) return Feasibility::Infeasible;
    }
  }

  // check constants, drop trivially true rows
  std::vector<LinConstraint> rows;
  for (auto& c : cs) {
    if (constant_violated(c)) return Feasibility::Infeasible;
    if (!c.expr.is_constant()) rows.push_back(std::move(c));
  }

  while (!rows.empty()) {
    if (!meter.spend()) return Feasibility::Budget;
    // pick the variable minimizing the number of bound combinations
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // uppers, lowers
    for (const auto& c : rows)
      for (const auto& [v, k] : c.expr.coeffs) {
        if (k > 0) counts[v].first++;
        else counts[v].second++;
      }
    std::string best;
    std::size_t best_cost = SIZE_MAX;
    for (const auto& [v, uc] : counts) {
      std::size_t cost = uc.first * uc.second;
      if (cost < best_cost) {
        best_cost = cost;
        best = v;
      }
    }

    std::vector<LinConstraint> uppers, lowers, rest;
    for (auto& c : rows) {
      auto it = c.expr.coeffs.find(best);
      if (it == c.expr.coeffs.end()) {
        rest.push_back(std::move(c));
        continue;
      }
      // normalize to  v <= e  or  v >= e  by dividing by |coeff|
      Rational k = it->second;
      c.expr.coeffs.erase(best);
      c.expr.scale(Rational(1) / (k > 0 ? k : -k));
      if (k > 0) uppers.push_back(std::move(c));   // v + e <= 0, i.e. v <= -e
      else lowers.push_back(std::move(c));         // -v + e <= 0, i.e. v >= e
    }
    for (const auto& up : uppers)
      for (const auto& lo : lowers) {
        if (!meter.spend()) return Feasibility::Budget;
        // v >= lo and v <= up combine to lo + up <= 0
        LinConstraint c;
        c.expr = up.expr;
        c.expr += lo.expr;
        c.rel = (up.rel == LinRel::Lt || lo.rel == LinRel::Lt) ? LinRel::Lt : LinRel::Le;
        if (constant_violated(c)) return Feasibility::Infeasible;
        if (!c.expr.is_constant()) rest.push_back(std::move(c));
      }
    rows = std::move(rest);
  }
  return Feasibility::Feasible;
}

}  // namespace dtv
