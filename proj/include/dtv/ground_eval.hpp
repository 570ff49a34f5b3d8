#pragma once

// Exact evaluation of variable-free expressions under the proof assistant's
// arithmetic conventions, which differ from ordinary math in ways that
// matter for soundness:
//
//   * nat subtraction truncates at zero: (1::nat) - 2 + 3 = 3
//   * unary minus on nat collapses to zero
//   * div/mod round toward negative infinity, with x div 0 = 0, x mod 0 = x
//   * field division by zero yields zero
//
// Every node visit charges the work meter, so evaluation is budgeted and
// cannot be blown up by huge exponents or factorials.

#include <map>
#include <string>

#include "dtv/ast.hpp"
#include "dtv/core.hpp"

namespace dtv {

struct WorkMeter {
  std::int64_t remaining = 0;

  bool spend(std::int64_t units = 1) {
    remaining -= units;
    return remaining >= 0;
  }
  bool exhausted() const { return remaining < 0; }
};

enum class EvalStatus { Ok, Unsupported, Budget };

struct EvalOutcome {
  EvalStatus status = EvalStatus::Ok;
  Rational value;
  std::string detail;  // construct name when Unsupported

  static EvalOutcome ok(Rational v) { return {EvalStatus::Ok, std::move(v), {}}; }
  static EvalOutcome fail(std::string what) { return {EvalStatus::Unsupported, {}, std::move(what)}; }
  static EvalOutcome budget() { return {EvalStatus::Budget, {}, {}}; }
};

// Size guards: beyond these the term is declared unsupported rather than
// burning the whole budget on one node.
inline constexpr std::uint64_t kMaxExponent = 65536;
inline constexpr std::uint64_t kMaxFactorial = 100000;

namespace detail {

inline Rational rat_floor_div(const Rational& a, const Rational& b) {
  // floor(a/b) as a rational integer
  Rational q = a / b;
  return Rational(floor_div(numerator(q), denominator(q)));
}

}  // namespace detail

// Type inference for a formula: the widest base type touched by an
// expression decides the arithmetic convention. Division and square roots
// force real; non-integer literals force real (the "rational coercion"
// applied when a nat-typed statement multiplies by 0.3); div/mod/gcd/lcm
// and factorial suggest nat; negation and negative literals force at least
// int; plain integer arithmetic defaults to int.
namespace detail {

inline int type_rank(BaseType t) {
  switch (t) {
    case BaseType::Nat: return 0;
    case BaseType::Int: return 1;
    case BaseType::Real: return 2;
  }
  return 1;
}

inline void widen(std::optional<BaseType>& acc, BaseType t) {
  if (!acc || type_rank(t) > type_rank(*acc)) acc = t;
}

inline void infer_expr(const ExprPtr& e, const std::map<std::string, BaseType>& vars,
                       std::optional<BaseType>& acc) {
  if (!e) return;
  switch (e->op) {
    case ExprOp::Lit:
      if (e->ascription) widen(acc, *e->ascription);
      else if (!is_integer(e->lit)) widen(acc, BaseType::Real);
      else if (e->lit < 0) widen(acc, BaseType::Int);
      break;
    case ExprOp::Neg:
      // nat has no negation, so the formula must live at int or wider
      widen(acc, BaseType::Int);
      break;
    case ExprOp::Var: {
      auto it = vars.find(e->var);
      widen(acc, it != vars.end() ? it->second : BaseType::Int);
      break;
    }
    case ExprOp::TrueDiv:
    case ExprOp::Sqrt:
    case ExprOp::Powr:
      widen(acc, BaseType::Real);
      break;
    case ExprOp::IntDiv:
    case ExprOp::Mod:
    case ExprOp::Gcd:
    case ExprOp::Lcm:
    case ExprOp::Fact:
      widen(acc, BaseType::Nat);
      break;
    default:
      break;
  }
  infer_expr(e->a, vars, acc);
  infer_expr(e->b, vars, acc);
}

}  // namespace detail

inline BaseType infer_type(const Formula& f, const std::map<std::string, BaseType>& vars) {
  std::optional<BaseType> acc;
  if (f.kind == Formula::Kind::Compare) {
    detail::infer_expr(f.lhs, vars, acc);
    detail::infer_expr(f.rhs, vars, acc);
  }
  return acc.value_or(BaseType::Int);
}

// Evaluates an expression under the given type's conventions. An optional
// assignment supplies variable values (the bounded-search and test oracles
// use this); without one, any variable is unsupported.
inline EvalOutcome eval_expr(const ExprPtr& e, BaseType ty, WorkMeter& meter,
                             const std::map<std::string, Rational>* assignment = nullptr) {
  if (!meter.spend()) return EvalOutcome::budget();
  const bool nat = ty == BaseType::Nat;
  switch (e->op) {
    case ExprOp::Lit: {
      if (ty != BaseType::Real && !is_integer(e->lit))
        return EvalOutcome::fail("non-integer literal in " + std::string(type_name(ty)) + " context");
      if (nat && e->lit < 0) return EvalOutcome::fail("negative literal in nat context");
      return EvalOutcome::ok(e->lit);
    }
    case ExprOp::Var: {
      if (assignment) {
        auto it = assignment->find(e->var);
        if (it != assignment->end()) return EvalOutcome::ok(it->second);
      }
      return EvalOutcome::fail("free variable '" + e->var + "'");
    }
    case ExprOp::Neg: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      if (nat) return EvalOutcome::ok(Rational(0));  // -n = 0 over nat
      return EvalOutcome::ok(-a.value);
    }
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      auto b = eval_expr(e->b, ty, meter, assignment);
      if (b.status != EvalStatus::Ok) return b;
      if (e->op == ExprOp::Add) return EvalOutcome::ok(a.value + b.value);
      if (e->op == ExprOp::Mul) return EvalOutcome::ok(a.value * b.value);
      if (nat && a.value < b.value) return EvalOutcome::ok(Rational(0));  // truncation
      return EvalOutcome::ok(a.value - b.value);
    }
    case ExprOp::TrueDiv: {
      if (ty != BaseType::Real)
        return EvalOutcome::fail("field division in " + std::string(type_name(ty)) + " context");
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      auto b = eval_expr(e->b, ty, meter, assignment);
      if (b.status != EvalStatus::Ok) return b;
      if (b.value == 0) return EvalOutcome::ok(Rational(0));  // x / 0 = 0
      return EvalOutcome::ok(a.value / b.value);
    }
    case ExprOp::IntDiv:
    case ExprOp::Mod: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      auto b = eval_expr(e->b, ty, meter, assignment);
      if (b.status != EvalStatus::Ok) return b;
      if (b.value == 0)
        return EvalOutcome::ok(e->op == ExprOp::IntDiv ? Rational(0) : a.value);
      Rational q = detail::rat_floor_div(a.value, b.value);
      if (e->op == ExprOp::IntDiv) return EvalOutcome::ok(q);
      return EvalOutcome::ok(a.value - b.value * q);
    }
    case ExprOp::Pow: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      // the parser guarantees a nonnegative integer literal exponent
      if (!e->b || e->b->op != ExprOp::Lit || !is_nonneg_integer(e->b->lit))
        return EvalOutcome::fail("non-literal exponent");
      BigInt exp = numerator(e->b->lit);
      if (exp > kMaxExponent) return EvalOutcome::fail("exponent too large");
      auto units = static_cast<std::int64_t>(static_cast<std::uint64_t>(exp));
      if (!meter.spend(units)) return EvalOutcome::budget();
      return EvalOutcome::ok(rat_pow(a.value, static_cast<std::uint64_t>(exp)));
    }
    case ExprOp::Powr:
      return EvalOutcome::fail("powr");
    case ExprOp::Gcd:
    case ExprOp::Lcm: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      auto b = eval_expr(e->b, ty, meter, assignment);
      if (b.status != EvalStatus::Ok) return b;
      if (!is_integer(a.value) || !is_integer(b.value))
        return EvalOutcome::fail("gcd/lcm of non-integer");
      BigInt x = numerator(a.value), y = numerator(b.value);
      if (x < 0) x = -x;
      if (y < 0) y = -y;
      return EvalOutcome::ok(Rational(e->op == ExprOp::Gcd ? big_gcd(x, y) : big_lcm(x, y)));
    }
    case ExprOp::Fact: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      if (!is_nonneg_integer(a.value)) return EvalOutcome::fail("factorial of non-nat");
      BigInt n = numerator(a.value);
      if (n > kMaxFactorial) return EvalOutcome::fail("factorial too large");
      auto units = static_cast<std::int64_t>(static_cast<std::uint64_t>(n));
      if (!meter.spend(units)) return EvalOutcome::budget();
      return EvalOutcome::ok(Rational(factorial(n)));
    }
    case ExprOp::Sqrt: {
      auto a = eval_expr(e->a, ty, meter, assignment);
      if (a.status != EvalStatus::Ok) return a;
      if (a.value < 0) return EvalOutcome::fail("sqrt of negative");
      auto root = exact_sqrt(a.value);
      if (!root) return EvalOutcome::fail("sqrt of non-square rational");
      return EvalOutcome::ok(*root);
    }
  }
  return EvalOutcome::fail("unknown operator");
}

// Public entry point matching the published contract: the caller names the
// type context explicitly.
inline EvalOutcome eval_ground(const ExprPtr& e, BaseType ty, WorkMeter& meter) {
  return eval_expr(e, ty, meter);
}

enum class TruthStatus { True, False, Unsupported, Budget };

struct TruthOutcome {
  TruthStatus status;
  std::string detail;
};

inline bool compare_values(CmpOp op, const Rational& a, const Rational& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

// Truth of a formula under an (optional) assignment, with the type context
// inferred from the formula itself.
inline TruthOutcome eval_formula(const Formula& f, const std::map<std::string, BaseType>& vars,
                                 WorkMeter& meter,
                                 const std::map<std::string, Rational>* assignment = nullptr) {
  if (f.kind == Formula::Kind::True) return {TruthStatus::True, {}};
  if (f.kind == Formula::Kind::False) return {TruthStatus::False, {}};
  BaseType ty = infer_type(f, vars);
  auto l = eval_expr(f.lhs, ty, meter, assignment);
  if (l.status == EvalStatus::Budget) return {TruthStatus::Budget, {}};
  if (l.status == EvalStatus::Unsupported) return {TruthStatus::Unsupported, l.detail};
  auto r = eval_expr(f.rhs, ty, meter, assignment);
  if (r.status == EvalStatus::Budget) return {TruthStatus::Budget, {}};
  if (r.status == EvalStatus::Unsupported) return {TruthStatus::Unsupported, r.detail};
  return {compare_values(f.op, l.value, r.value) ? TruthStatus::True : TruthStatus::False, {}};
}

}  // namespace dtv
