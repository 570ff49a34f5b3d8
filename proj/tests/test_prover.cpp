#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>

#include "dtv/fixtures.hpp"
#include "dtv/parser.hpp"
#include "dtv/prover.hpp"

using namespace dtv;

namespace {

FormalStatement must_parse(const std::string& text) {
  auto r = parse_statement(text);
  INFO(text);
  if (!r.ok()) INFO(r.error().render());
  REQUIRE(r.ok());
  return std::move(r).take();
}

ProveOutcome prove_text(const std::string& text, std::int64_t budget = 200000) {
  auto stmt = must_parse(text);
  return prove(task_from_statement(stmt, budget));
}

// Exhaustive check over small nat points: returns false if some assignment
// satisfies every hypothesis but falsifies the goal.
bool no_small_counterexample(const FormalStatement& stmt, int bound) {
  auto types = stmt.var_types();
  std::vector<std::string> vars;
  for (const auto& [v, t] : types) {
    if (t != BaseType::Nat) return true;  // only exhaustible domains
    vars.push_back(v);
  }
  std::vector<int> point(vars.size(), 0);
  for (;;) {
    std::map<std::string, Rational> asg;
    for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = Rational(point[i]);
    WorkMeter meter{100000};
    bool hyps = true;
    for (const auto& a : stmt.assumes) {
      auto tv = eval_formula(a.formula, types, meter, &asg);
      if (tv.status != TruthStatus::True) {
        hyps = false;
        break;
      }
    }
    if (hyps) {
      auto tv = eval_formula(stmt.shows, types, meter, &asg);
      if (tv.status == TruthStatus::False) return false;
    }
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (point[i] < bound) {
        ++point[i];
        break;
      }
      point[i] = 0;
    }
    if (i == vars.size()) return true;
  }
}

}  // namespace

TEST_CASE("bundled worked statements are all proved") {
  for (const auto& fc : fixture_cases()) {
    auto stmt = must_parse(fc.statements[1]);
    auto out = prove(task_from_statement(stmt, 200000));
    INFO(fc.problem.id << ": " << prove_status_name(out.status) << " " << out.detail);
    CHECK(out.status == ProveStatus::Proved);
  }
}

TEST_CASE("ground goals go through evaluation") {
  auto ok = prove_text("theorem \"2 + 2 = 4\"");
  CHECK(ok.status == ProveStatus::Proved);
  CHECK(ok.detail == "ground-eval");

  auto bad = prove_text("theorem \"2 + 2 = 5\"");
  CHECK(bad.status == ProveStatus::Unproved);

  auto digits = prove_text("theorem \"(5 * 6 * 7 * 8 * 9 * 10) div 100 mod 10 = 2\"");
  CHECK(digits.status == ProveStatus::Proved);
}

TEST_CASE("hypothesis matching is commutativity-aware") {
  SECTION("addition commutes") {
    auto out = prove_text(
        "theorem fixes a b :: nat assumes \"a + b = 10\" shows \"b + a = 10\"");
    CHECK(out.status == ProveStatus::Proved);
    CHECK(out.detail == "hyp-match");
  }
  SECTION("multiplication commutes") {
    auto out = prove_text(
        "theorem fixes a b c :: real assumes \"a * b = c\" shows \"b * a = c\"");
    CHECK(out.status == ProveStatus::Proved);
    CHECK(out.detail == "hyp-match");
  }
  SECTION("equality orientation is ignored") {
    auto out = prove_text(
        "theorem fixes a b :: nat assumes \"a + b = 10\" shows \"10 = b + a\"");
    CHECK(out.status == ProveStatus::Proved);
    CHECK(out.detail == "hyp-match");
  }
  SECTION("no reassociation: linear arithmetic picks it up instead") {
    auto out = prove_text(
        "theorem fixes a b c :: real assumes \"(a + b) + c = 9\" shows \"a + (b + c) = 9\"");
    CHECK(out.status == ProveStatus::Proved);
    CHECK(out.detail == "linear-arith");
  }
  SECTION("subtraction does not commute") {
    auto out = prove_text(
        "theorem fixes a b :: int assumes \"a - b = 1\" shows \"b - a = 1\"");
    CHECK(out.status == ProveStatus::Unproved);
  }
}

TEST_CASE("linear arithmetic closes simple systems") {
  SECTION("two equations") {
    auto out = prove_text(
        "theorem fixes c d :: nat assumes \"c + d = 180\" and \"2 * c + d = 304\" "
        "shows \"d = 56\"");
    CHECK(out.status == ProveStatus::Proved);
    CHECK(out.detail == "linear-arith");
  }
  SECTION("inequality chaining") {
    auto out = prove_text(
        "theorem fixes x y :: real assumes \"x \\<le> 5\" and \"y \\<le> 3\" "
        "shows \"x + y \\<le> 8\"");
    CHECK(out.status == ProveStatus::Proved);
  }
  SECTION("strict to non-strict over the rational relaxation stays open") {
    auto out = prove_text(
        "theorem fixes x :: nat assumes \"x < 5\" shows \"x \\<le> 4\"");
    CHECK(out.status == ProveStatus::Unproved);
  }
  SECTION("scaling and combination") {
    auto out = prove_text(
        "theorem fixes x y :: real assumes \"2 * x + 3 * y = 12\" and \"x = 3\" "
        "shows \"y = 2\"");
    CHECK(out.status == ProveStatus::Proved);
  }
  SECTION("real division in hypotheses") {
    auto out = prove_text(
        "theorem fixes s :: real assumes \"s / 4 = 20\" shows \"s = 80\"");
    CHECK(out.status == ProveStatus::Proved);
  }
  SECTION("wrong conclusion is not proved") {
    auto out = prove_text(
        "theorem fixes c d :: nat assumes \"c + d = 180\" and \"2 * c + d = 304\" "
        "shows \"d = 57\"");
    CHECK(out.status == ProveStatus::Unproved);
  }
}

TEST_CASE("nat subtraction is handled by case splitting") {
  auto trunc = prove_text("theorem fixes x :: nat assumes \"x = 3\" shows \"x - 5 = 0\"");
  CHECK(trunc.status == ProveStatus::Proved);

  auto john = prove_text(
      "theorem fixes j f :: nat assumes \"f - j = 27\" and \"f = 2 * j + 13\" and \"j > 10\" "
      "shows \"j = 14\"");
  CHECK(john.status == ProveStatus::Proved);

  auto keeps = prove_text("theorem fixes x :: nat assumes \"x - 5 = 0\" shows \"x = 5\"");
  CHECK(keeps.status == ProveStatus::Unproved);  // x could be anything below 5
}

TEST_CASE("nat variables are implicitly nonnegative") {
  auto out = prove_text("theorem fixes x :: nat shows \"x \\<ge> 0\"");
  CHECK(out.status == ProveStatus::Proved);
  auto intver = prove_text("theorem fixes x :: int shows \"x \\<ge> 0\"");
  CHECK(intver.status == ProveStatus::Unproved);
}

TEST_CASE("nonlinear goals are unsupported by name") {
  auto sq = prove_text("theorem fixes x :: real assumes \"x > 0\" shows \"x * x \\<ge> 0\"");
  CHECK(sq.status == ProveStatus::Unsupported);
  CHECK(sq.detail == "nonlinear product");

  auto pw = prove_text("theorem fixes x :: real assumes \"x > 2\" shows \"x ^ 2 > 4\"");
  CHECK(pw.status == ProveStatus::Unsupported);
  CHECK(pw.detail == "nonlinear power");

  auto dv = prove_text("theorem fixes x y :: real assumes \"x = y\" shows \"x / y = 1\"");
  CHECK(dv.status == ProveStatus::Unsupported);
  CHECK(dv.detail == "division by a variable expression");
}

TEST_CASE("nonlinear hypotheses are dropped, not fatal") {
  auto out = prove_text(
      "theorem fixes x y :: real assumes \"x * x = 16\" and \"y = 2\" shows \"y + 1 = 3\"");
  CHECK(out.status == ProveStatus::Proved);
}

TEST_CASE("literal powers of variables stay supported in hypotheses via evaluation") {
  // (-1)^2 and friends appear as literal powers; the hypothesis side keeps
  // constants exact.
  auto out = prove_text(
      "theorem fixes a b :: real assumes \"a = 2 ^ 3\" and \"b = a + 1\" shows \"b = 9\"");
  CHECK(out.status == ProveStatus::Proved);
}

TEST_CASE("vacuous detection proves False from contradictions") {
  auto contradictory = must_parse(
      "theorem fixes x :: nat assumes \"x = 3\" and \"x = 4\" shows \"x = 3\"");
  CHECK(check_vacuous(contradictory, 200000));

  auto ineq = must_parse(
      "theorem fixes x :: real assumes \"x < 2\" and \"x > 3\" shows \"x = 0\"");
  CHECK(check_vacuous(ineq, 200000));

  auto fine = must_parse(
      "theorem fixes x :: nat assumes \"x = 3\" shows \"x = 3\"");
  CHECK_FALSE(check_vacuous(fine, 200000));

  for (const auto& fc : fixture_cases()) {
    auto good = must_parse(fc.statements[1]);
    INFO(fc.problem.id);
    CHECK_FALSE(check_vacuous(good, 200000));
    auto vac = must_parse(fc.statements[2]);
    CHECK(check_vacuous(vac, 200000));
  }
}

TEST_CASE("goal substitution builds the vacuity probe") {
  auto stmt = must_parse("theorem fixes x :: nat assumes \"x = 1\" shows \"x = 1\"");
  auto probed = substitute_goal_false(stmt);
  CHECK(probed.shows.kind == Formula::Kind::False);
  CHECK(probed.assumes.size() == 1);
  CHECK(stmt.shows.kind == Formula::Kind::Compare);
}

TEST_CASE("tiny budgets exhaust rather than answer") {
  auto out = prove_text(
      "theorem fixes c d :: nat assumes \"c + d = 180\" and \"2 * c + d = 304\" "
      "shows \"d = 56\"",
      3);
  CHECK(out.status == ProveStatus::BudgetExhausted);

  // a budget too small to prove False keeps the statement
  auto contradictory = must_parse(
      "theorem fixes x :: nat assumes \"x = 3\" and \"x = 4\" shows \"x = 3\"");
  CHECK_FALSE(check_vacuous(contradictory, 1));
}

TEST_CASE("raising the budget never loses a proof") {
  const char* texts[] = {
      "theorem \"2 + 2 = 4\"",
      "theorem fixes a b :: nat assumes \"a + b = 10\" shows \"b + a = 10\"",
      "theorem fixes c d :: nat assumes \"c + d = 180\" and \"2 * c + d = 304\" shows \"d = 56\"",
      "theorem fixes j f :: nat assumes \"f - j = 27\" and \"f = 2 * j + 13\" shows \"j > 10\"",
  };
  for (const char* text : texts) {
    bool proved_before = false;
    for (std::int64_t budget : {10, 100, 1000, 10000, 100000, 1000000}) {
      auto out = prove_text(text, budget);
      INFO(text << " at budget " << budget);
      if (proved_before) CHECK(out.status == ProveStatus::Proved);
      if (out.status == ProveStatus::Proved) proved_before = true;
    }
    CHECK(proved_before);
  }
}

TEST_CASE("proved statements survive exhaustive small-domain checking") {
  const char* texts[] = {
      "theorem fixes c d :: nat assumes \"c + d = 18\" and \"2 * c + d = 30\" shows \"d = 6\"",
      "theorem fixes x :: nat assumes \"x = 3\" shows \"x - 5 = 0\"",
      "theorem fixes j f :: nat assumes \"f - j = 7\" and \"f = 2 * j + 3\" and \"j > 2\" "
      "shows \"j = 4\"",
      "theorem fixes x y :: nat assumes \"x + y = 12\" and \"x - y = 2\" and \"y \\<le> x\" "
      "shows \"x = 7\"",
  };
  for (const char* text : texts) {
    auto stmt = must_parse(text);
    auto out = prove(task_from_statement(stmt, 500000));
    INFO(text);
    REQUIRE(out.status == ProveStatus::Proved);
    CHECK(no_small_counterexample(stmt, 30));
  }
}

TEST_CASE("proof tasks and outcomes serialize") {
  auto stmt = must_parse(
      "theorem fixes x :: nat assumes \"x = 3\" shows \"x + 1 = 4\"");
  ProofTask task = task_from_statement(stmt, 12345);
  Json j = task;
  ProofTask back = j.get<ProofTask>();
  CHECK(back.budget == 12345);
  CHECK(back.var_types == task.var_types);
  REQUIRE(back.hypotheses.size() == 1);
  CHECK(formula_equal(back.hypotheses[0], task.hypotheses[0]));
  CHECK(formula_equal(back.goal, task.goal));

  ProveOutcome out{ProveStatus::Unsupported, "nonlinear product"};
  Json jo = out;
  ProveOutcome oback = jo.get<ProveOutcome>();
  CHECK(oback.status == ProveStatus::Unsupported);
  CHECK(oback.detail == "nonlinear product");
}

TEST_CASE("prover backend interface dispatches to the built-in portfolio") {
  BuiltinProver prover;
  auto stmt = must_parse("theorem \"1 + 1 = 2\"");
  auto out = prover.prove_task(task_from_statement(stmt, 1000));
  CHECK(out.status == ProveStatus::Proved);
}
