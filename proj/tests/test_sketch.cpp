#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "dtv/fixtures.hpp"
#include "dtv/parser.hpp"
#include "dtv/printer.hpp"

using namespace dtv;

namespace {

FormalStatement stmt_x5() {
  auto r = parse_statement(
      "theorem fixes x :: nat assumes \"x = 2 + 3\" shows \"x = 5\"");
  REQUIRE(r.ok());
  return std::move(r).take();
}

SolutionSketch must_sketch(const std::string& text, const FormalStatement& stmt) {
  auto r = parse_sketch(text, stmt);
  INFO(text);
  if (!r.ok()) INFO(r.error().render());
  REQUIRE(r.ok());
  return std::move(r).take();
}

Error sketch_fail(const std::string& text, const FormalStatement& stmt) {
  auto r = parse_sketch(text, stmt);
  INFO(text);
  REQUIRE_FALSE(r.ok());
  return r.error();
}

std::string goal_text(const SolutionSketch& sk, std::size_t i) {
  REQUIRE(i < sk.steps.size());
  return print_formula(sk.steps[i].goal);
}

}  // namespace

TEST_CASE("plain have chain with closing thesis") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "proof -\n"
      "  have \"x = 2 + 3\" using assms by auto\n"
      "  then have \"x = 5\" by simp\n"
      "  then show ?thesis by simp\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 3);
  CHECK(goal_text(sk, 0) == "x = 2 + 3");
  CHECK(goal_text(sk, 1) == "x = 5");
  CHECK(goal_text(sk, 2) == "x = 5");
  CHECK(sk.closes_thesis);
  CHECK_FALSE(sk.empty());
}

TEST_CASE("show with explicit goal instead of ?thesis") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "proof -\n"
      "  show \"x = 5\" using assms by arith\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 1);
  CHECK(sk.closes_thesis);

  auto other = must_sketch(
      "proof -\n"
      "  show \"x = 2 + 3\" using assms by simp\n"
      "qed",
      stmt);
  CHECK_FALSE(other.closes_thesis);
}

TEST_CASE("calculation chain substitutes dots with the previous rhs") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "proof -\n"
      "  have \"x = 2 + 3\" using assms by simp\n"
      "  also have \"\\<dots> = 5\" by simp\n"
      "  finally show ?thesis .\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 3);
  CHECK(goal_text(sk, 0) == "x = 2 + 3");
  CHECK(goal_text(sk, 1) == "2 + 3 = 5");
  CHECK(goal_text(sk, 2) == "x = 5");
  CHECK(sk.closes_thesis);
}

TEST_CASE("unicode ellipsis works like the escape form") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "proof -\n"
      "  have \"x = 2 + 3\" by simp\n"
      "  also have \"… = 5\" by simp\n"
      "  finally show ?thesis by simp\n"
      "qed",
      stmt);
  CHECK(goal_text(sk, 1) == "2 + 3 = 5");
}

TEST_CASE("finally have continues after collapsing the chain") {
  auto r = parse_statement(
      "theorem fixes x :: nat assumes \"x = 1 + 1 + 1\" shows \"x + 1 = 4\"");
  REQUIRE(r.ok());
  auto stmt = std::move(r).take();
  auto sk = must_sketch(
      "proof -\n"
      "  have \"x = 1 + 1 + 1\" using assms by simp\n"
      "  also have \"\\<dots> = 3\" by simp\n"
      "  finally have \"x + 1 = 3 + 1\" by simp\n"
      "  then show ?thesis by simp\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 5);
  CHECK(goal_text(sk, 0) == "x = 1 + 1 + 1");
  CHECK(goal_text(sk, 1) == "1 + 1 + 1 = 3");
  CHECK(goal_text(sk, 2) == "x = 3");
  CHECK(goal_text(sk, 3) == "x + 1 = 3 + 1");
  CHECK(goal_text(sk, 4) == "x + 1 = 4");
  CHECK(sk.closes_thesis);
}

TEST_CASE("labeled steps are accepted and the label discarded") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "proof -\n"
      "  have c0: \"x = 2 + 3\" using assms by auto\n"
      "  then have c1: \"x = 5\" using c0 by simp\n"
      "  then show ?thesis using c1 by blast\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 3);
  CHECK(goal_text(sk, 0) == "x = 2 + 3");
  CHECK(sk.closes_thesis);
}

TEST_CASE("justification forms are parsed and discarded") {
  auto stmt = stmt_x5();
  const char* bodies[] = {
      "have \"x = 5\" using assms by auto  [ATP]\n  then show ?thesis by simp",
      "have \"x = 5\" using assms(1) by (simp add: algebra_simps)\n  then show ?thesis .",
      "have \"x = 5\" by arith\n  thus ?thesis ..",
      "have \"x = 5\" using assms unfolding assms by auto\n  then show ?thesis sledgehammer",
      "have \"x = 5\" by (auto simp: field_simps)[1]\n  then show ?thesis by -",
      "hence \"x = 5\" by simp\n  then show ?thesis by (metis mult_commute)",
  };
  for (const char* body : bodies) {
    std::string text = std::string("proof -\n  ") + body + "\nqed";
    auto sk = must_sketch(text, stmt);
    CHECK(sk.closes_thesis);
  }
}

TEST_CASE("comments become step annotations") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "proof -\n"
      "  (* add the two numbers *)\n"
      "  have \"x = 2 + 3\" by simp\n"
      "  (* so the total is five *)\n"
      "  then show ?thesis by simp\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 2);
  CHECK(sk.steps[0].annotation == "add the two numbers");
  CHECK(sk.steps[1].annotation == "so the total is five");
}

TEST_CASE("restatement of the theorem before the proof is skipped") {
  auto stmt = stmt_x5();
  auto sk = must_sketch(
      "theorem fixes x :: nat assumes \"x = 2 + 3\" shows \"x = 5\"\n"
      "proof -\n"
      "  show ?thesis using assms by auto\n"
      "qed",
      stmt);
  REQUIRE(sk.steps.size() == 1);
  CHECK(sk.closes_thesis);
}

TEST_CASE("empty input means statement-only verification") {
  auto stmt = stmt_x5();
  auto sk = must_sketch("", stmt);
  CHECK(sk.empty());
  CHECK(sk.steps.empty());
  CHECK_FALSE(sk.closes_thesis);
  auto ws = must_sketch("  \n \t ", stmt);
  CHECK(ws.empty());
}

TEST_CASE("text without a proof block is rejected") {
  auto stmt = stmt_x5();
  auto e = sketch_fail("The answer is clearly five.", stmt);
  CHECK(e.code == ErrCode::ParseError);
  CHECK(e.message == "no proof block found");
}

TEST_CASE("sketch error cases") {
  auto stmt = stmt_x5();
  SECTION("missing qed") {
    auto e = sketch_fail("proof -\n  have \"x = 5\" by simp\n", stmt);
    CHECK(e.message == "missing 'qed'");
  }
  SECTION("empty body") {
    auto e = sketch_fail("proof -\nqed", stmt);
    CHECK(e.message == "empty proof body");
  }
  SECTION("step after show") {
    auto e = sketch_fail(
        "proof -\n  show ?thesis by simp\n  have \"x = 5\" by simp\nqed", stmt);
    CHECK(e.message == "proof continues after 'show'");
  }
  SECTION("also without preceding step") {
    auto e = sketch_fail("proof -\n  also have \"\\<dots> = 5\" by simp\nqed", stmt);
    CHECK(e.message == "'also' with no preceding step");
  }
  SECTION("dots outside a chain") {
    auto e = sketch_fail("proof -\n  have \"\\<dots> = 5\" by simp\nqed", stmt);
    CHECK(e.message.find("outside a calculation chain") != std::string::npos);
  }
  SECTION("structured proof method") {
    auto e = sketch_fail("proof (induct x)\n  show ?thesis by simp\nqed", stmt);
    CHECK(e.code == ErrCode::Unsupported);
    CHECK(e.message == "structured proof method");
  }
  SECTION("nested proof") {
    auto e = sketch_fail(
        "proof -\n  have \"x = 5\" proof -\n    show ?thesis by simp\n  qed\nqed", stmt);
    CHECK(e.code == ErrCode::Unsupported);
    CHECK(e.message == "nested proof");
  }
  SECTION("unsupported step forms are named") {
    for (const char* bad : {"obtain", "case", "assume", "fix", "let", "define"}) {
      std::string text = std::string("proof -\n  ") + bad + " y where \"y = 1\"\nqed";
      auto e = sketch_fail(text, stmt);
      INFO(bad);
      CHECK(e.code == ErrCode::Unsupported);
      CHECK(e.message == std::string("'") + bad + "'");
    }
  }
  SECTION("trailing text after qed") {
    auto e = sketch_fail("proof -\n  show ?thesis by simp\nqed\nextra words", stmt);
    CHECK(e.message == "unexpected input after 'qed'");
  }
}

TEST_CASE("comment after qed is fine") {
  auto stmt = stmt_x5();
  auto sk = must_sketch("proof -\n  show ?thesis by auto\nqed (* done *)", stmt);
  CHECK(sk.closes_thesis);
}

TEST_CASE("bundled benign sketch parses against every fixture statement") {
  const std::string benign =
      "proof -\n  show ?thesis using assms by auto\nqed";
  for (const auto& fc : fixture_cases()) {
    for (const auto& text : fc.statements) {
      auto stmt = parse_statement(text);
      REQUIRE(stmt.ok());
      auto sk = must_sketch(benign, stmt.value());
      CHECK(sk.closes_thesis);
      REQUIRE(sk.steps.size() == 1);
      CHECK(formula_equal(sk.steps[0].goal, stmt.value().shows));
    }
  }
}
