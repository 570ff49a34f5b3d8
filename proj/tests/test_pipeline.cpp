// Pipeline orchestration: statement attempts, filters, sketch verification,
// answer selection, config loading, and the replayable worked-example runs.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "dtv/core.hpp"
#include "dtv/fixtures.hpp"
#include "dtv/llm.hpp"
#include "dtv/pipeline.hpp"
#include "dtv/prompts.hpp"
#include "dtv/prover.hpp"

using namespace dtv;

namespace {

FormalStatement must_statement(const std::string& text) {
  auto parsed = parse_statement(text);
  REQUIRE(parsed.ok());
  return std::move(parsed).take();
}

SolutionSketch must_sketch(const std::string& text, const FormalStatement& stmt) {
  auto parsed = parse_sketch(text, stmt);
  REQUIRE(parsed.ok());
  return std::move(parsed).take();
}

std::string sol_text(const std::string& ans) {
  return "Working it out. Final Answer: The final answer is $" + ans + "$. I hope it is correct.";
}

Problem stub_problem() {
  Problem p;
  p.id = "two-plus-three";
  p.statement_text = "What is two plus three?";
  p.ground_truth = "5";
  p.dataset = Dataset::Gsm8k;
  return p;
}

const char* kStmtA =
    "theorem\n  fixes x :: nat\n  assumes \"x = 2 + 3\"\n  shows \"x = 5\"";
// same statement as kStmtA up to whitespace, so it re-prints identically
const char* kStmtAVariant =
    "theorem\n  fixes x :: nat\n  assumes \"x = 2+3\"\n  shows \"x   = 5\"";
const char* kStmtB =
    "theorem\n  fixes x :: nat\n  assumes \"x = 5\"\n  shows \"x = 5\"";

// Serves canned completions by prompt shape and logs every request.
struct StubBackend : LlmBackend {
  std::vector<std::string> statement_queue{kStmtA};
  std::size_t statement_calls = 0;
  std::string sketch_text = FixtureOracle::benign_sketch();
  std::vector<std::string> solution_texts{sol_text("5")};
  std::vector<double> critique_scores{-1.0, -2.0};
  std::vector<GenRequest> gen_log;
  std::vector<ScoreRequest> score_log;

  std::string name() const override { return "stub"; }

  Result<std::vector<std::string>> generate(const GenRequest& req) override {
    gen_log.push_back(req);
    if (req.prompt.ends_with(std::string(kFormalSolutionCue) + "\n"))
      return std::vector<std::string>{sketch_text};
    if (req.prompt.ends_with(std::string(kFormalStatementCue) + "\n")) {
      if (statement_queue.empty())
        return Error{ErrCode::BackendError, "stub: no statements scripted"};
      std::size_t i = std::min(statement_calls, statement_queue.size() - 1);
      ++statement_calls;
      return std::vector<std::string>{statement_queue[i]};
    }
    if (req.prompt.ends_with(std::string(kSolutionCue) + "\n")) {
      std::vector<std::string> out = solution_texts;
      out.resize(static_cast<std::size_t>(req.n), solution_texts.back());
      return out;
    }
    return Error{ErrCode::BackendError, "stub: unexpected prompt"};
  }

  Result<std::vector<double>> score(const ScoreRequest& req) override {
    score_log.push_back(req);
    return critique_scores;
  }
};

// Replays a queue of canned outcomes and logs the tasks it was given.
struct ScriptedProver : ProverBackend {
  std::vector<ProveOutcome> outcomes;
  std::vector<ProofTask> log;

  explicit ScriptedProver(std::vector<ProveOutcome> q) : outcomes(std::move(q)) {}

  ProveOutcome prove_task(const ProofTask& task) override {
    log.push_back(task);
    std::size_t i = log.size() - 1;
    return i < outcomes.size() ? outcomes[i] : ProveOutcome{};
  }
};

SampleRecord rec(const std::string& answer_text, bool verified) {
  SampleRecord r;
  r.answer = canonicalize(answer_text);
  r.verified = verified;
  return r;
}

std::string run_fingerprint(const std::vector<ProblemRun>& runs) {
  std::string out;
  for (const auto& r : runs) {
    out += r.problem_id + "|";
    out += r.selection ? canonical_text(r.selection->answer) : std::string("-");
    out += "|";
    out += r.selection ? selection_mode_name(r.selection->mode) : "-";
    out += "\n";
    for (const auto& t : r.trace) out += Json(t).dump() + "\n";
    for (const auto& record : r.records) {
      out += record.answer ? canonical_text(*record.answer) : std::string("-");
      if (record.verified) out += "+v";
      for (const auto& a : record.attempts) out += "|" + Json(a).dump();
      out += "\n";
    }
  }
  return out;
}

}  // namespace

TEST_CASE("pipeline config validation") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());

  auto expect = [](PipelineConfig bad, const std::string& needle) {
    try {
      bad.validate();
      FAIL("expected validation to throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("invalid config") != std::string::npos);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  c = PipelineConfig{};
  c.samples_per_problem = 0;
  expect(c, "samples_per_problem");
  c = PipelineConfig{};
  c.statement_attempts_per_solution = 0;
  expect(c, "statement_attempts_per_solution");
  c = PipelineConfig{};
  c.demos_per_statement_prompt = -1;
  expect(c, "demos_per_statement_prompt");
  c = PipelineConfig{};
  c.demos_per_statement_prompt = 26;
  expect(c, "exceeds demo_pool_size");
  c = PipelineConfig{};
  c.demos_per_solution_prompt = 11;
  expect(c, "exceeds solution_demo_pool_size");
  c = PipelineConfig{};
  c.prover_budget = 0;
  expect(c, "prover_budget");
  c = PipelineConfig{};
  c.sampling.temperature = -0.01;
  expect(c, "temperature");
  c = PipelineConfig{};
  c.sampling.nucleus_p = 0.0;
  expect(c, "nucleus_p");
  c = PipelineConfig{};
  c.sampling.nucleus_p = 1.2;
  expect(c, "nucleus_p");
}

TEST_CASE("flat config text loading") {
  std::string text =
      "# selection settings\n"
      "samples_per_problem = 8\n"
      "\n"
      "  temperature =  0.25 \n"
      "nucleus_p=0.9\r\n"
      "max_tokens = 128\n"
      "use_sketches = false\n"
      "self_critique = 1\n"
      "seed = 99\n";
  PipelineConfig c = load_config_text(text);
  CHECK(c.samples_per_problem == 8);
  CHECK(c.sampling.temperature == 0.25);
  CHECK(c.sampling.nucleus_p == 0.9);
  CHECK(c.sampling.max_tokens == 128);
  CHECK_FALSE(c.use_sketches);
  CHECK(c.self_critique);
  CHECK(c.seed == 99);
  // untouched keys keep their defaults
  CHECK(c.statement_attempts_per_solution == PipelineConfig{}.statement_attempts_per_solution);

  SECTION("unknown keys are rejected") {
    CHECK_THROWS_WITH(load_config_text("tempature = 0.5\n"),
                      Catch::Matchers::ContainsSubstring("unknown key 'tempature'"));
  }
  SECTION("lines need a key value separator") {
    CHECK_THROWS_WITH(load_config_text("seed = 1\nnot a setting\n"),
                      Catch::Matchers::ContainsSubstring("line 2 has no '='"));
  }
  SECTION("booleans are strict") {
    CHECK_THROWS_WITH(load_config_text("use_sketches = yes\n"),
                      Catch::Matchers::ContainsSubstring("boolean expected for use_sketches"));
  }
  SECTION("validation runs after loading") {
    CHECK_THROWS_WITH(load_config_text("samples_per_problem = 0\n"),
                      Catch::Matchers::ContainsSubstring("samples_per_problem must be >= 1"));
  }
}

TEST_CASE("config digest is content addressed") {
  PipelineConfig a, b;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a) == hex_digest(Json(a).dump()));
  b.seed = 1;
  CHECK(config_digest(a) != config_digest(b));
  b = a;
  b.sampling.temperature = 0.7;
  CHECK(config_digest(a) != config_digest(b));

  Json j = a;
  PipelineConfig back = j.get<PipelineConfig>();
  CHECK(config_digest(back) == config_digest(a));
}

TEST_CASE("statement attempts separate parse failures, duplicates, and fresh parses") {
  StubBackend llm;
  llm.statement_queue = {"this is not a theorem", kStmtA, kStmtAVariant, kStmtB};
  PipelineConfig config = fixture_config();
  config.statement_attempts_per_solution = 4;
  DemoPool pool = builtin_demo_pool();
  Problem problem = stub_problem();
  Answer answer = canonicalize("5");
  std::vector<TraceRow> trace;

  auto got = formalize_statement(problem, answer, llm, pool, config, 0, &trace);
  REQUIRE(got.ok());
  const auto& attempts = got.value();
  REQUIRE(attempts.size() == 4);

  CHECK_FALSE(attempts[0].statement.has_value());
  CHECK_FALSE(attempts[0].parse_error.empty());
  CHECK_FALSE(attempts[0].duplicate);

  REQUIRE(attempts[1].statement.has_value());
  CHECK_FALSE(attempts[1].duplicate);

  REQUIRE(attempts[2].statement.has_value());
  CHECK(attempts[2].duplicate);
  CHECK(print_statement(*attempts[2].statement) == print_statement(*attempts[1].statement));

  REQUIRE(attempts[3].statement.has_value());
  CHECK_FALSE(attempts[3].duplicate);
  CHECK(attempts[3].index == 3);

  REQUIRE(trace.size() == 4);
  CHECK(trace[0].outcome == "parse-failed");
  CHECK(trace[1].outcome == "parsed");
  CHECK(trace[2].outcome == "duplicate");
  CHECK(trace[3].outcome == "parsed");
  for (const auto& row : trace) {
    CHECK(row.stage == "statement");
    CHECK(row.problem_id == problem.id);
    CHECK(row.sample_index == 0);
    CHECK_FALSE(row.digest.empty());
  }

  SECTION("formalization requests pin sampling down") {
    REQUIRE(llm.gen_log.size() == 4);
    for (const auto& req : llm.gen_log) {
      CHECK(req.n == 1);
      CHECK(req.temperature == 0.0);
      CHECK(req.nucleus_p == 1.0);
    }
    // redrawn demos vary the prompt across attempts
    CHECK(llm.gen_log[0].prompt != llm.gen_log[1].prompt);
  }
}

TEST_CASE("filters discard vacuous and unfaithful statements") {
  StubBackend llm;
  BuiltinProver prover;
  DemoPool pool = builtin_demo_pool();
  PipelineConfig config = fixture_config();
  Problem problem = stub_problem();
  Answer answer = canonicalize("5");
  std::vector<TraceRow> trace;

  FormalStatement honest = must_statement(kStmtA);
  FormalStatement vacuous = must_statement(
      "theorem\n  fixes n :: nat\n  assumes \"n < 3\"\n    and \"n > 4\"\n  shows \"n = 5\"");

  SECTION("vacuous statements are caught before any critique call") {
    auto got = apply_filters(vacuous, problem, answer, llm, prover, pool, config, &trace, 0, 0);
    REQUIRE(got.ok());
    CHECK_FALSE(got.value().keep);
    CHECK(got.value().reason == VerifyStatus::Vacuous);
    CHECK(got.value().detail == "assumptions prove False");
    CHECK(llm.score_log.empty());
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].stage == "filter");
    CHECK(trace[0].outcome == "vacuous");
    CHECK(trace[0].digest.empty());
  }

  SECTION("critique rejects when No outscores Yes") {
    llm.critique_scores = {-2.0, -1.0};
    auto got = apply_filters(honest, problem, answer, llm, prover, pool, config, &trace, 0, 0);
    REQUIRE(got.ok());
    CHECK_FALSE(got.value().keep);
    CHECK(got.value().reason == VerifyStatus::Unfaithful);
    REQUIRE(llm.score_log.size() == 1);
    CHECK(llm.score_log[0].continuations ==
          std::vector<std::string>{kYesPrefix, kNoPrefix});
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].outcome == "unfaithful");
    CHECK_FALSE(trace[0].digest.empty());
  }

  SECTION("critique keeps when Yes outscores No") {
    llm.critique_scores = {-1.0, -2.0};
    auto got = apply_filters(honest, problem, answer, llm, prover, pool, config, &trace, 0, 0);
    REQUIRE(got.ok());
    CHECK(got.value().keep);
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].outcome == "kept");
    CHECK_FALSE(trace[0].digest.empty());
  }

  SECTION("a tie keeps the statement") {
    llm.critique_scores = {-1.5, -1.5};
    auto got = apply_filters(honest, problem, answer, llm, prover, pool, config, &trace, 0, 0);
    REQUIRE(got.ok());
    CHECK(got.value().keep);
  }

  SECTION("vacuous filter can be disabled") {
    config.vacuous_filter = false;
    llm.critique_scores = {-1.0, -2.0};
    auto got = apply_filters(vacuous, problem, answer, llm, prover, pool, config, &trace, 0, 0);
    REQUIRE(got.ok());
    CHECK(got.value().keep);
    CHECK(llm.score_log.size() == 1);
  }

  SECTION("critique can be disabled") {
    config.self_critique = false;
    auto got = apply_filters(honest, problem, answer, llm, prover, pool, config, &trace, 0, 0);
    REQUIRE(got.ok());
    CHECK(got.value().keep);
    CHECK(llm.score_log.empty());
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].outcome == "kept");
    CHECK(trace[0].digest.empty());
  }
}

TEST_CASE("verification walks sketch steps against the growing proved set") {
  FormalStatement stmt = must_statement(
      "theorem\n  fixes x :: nat\n  assumes \"x = 2 + 3\"\n  shows \"x = 6 - 1\"");
  SolutionSketch sketch = must_sketch(
      "proof -\n  have \"x = 5\"\n  have \"x = 4 + 1\"\n  show \"x = 6 - 1\"\nqed", stmt);
  REQUIRE(sketch.steps.size() == 3);
  REQUIRE(sketch.closes_thesis);

  auto proved = [](const std::string& d) { return ProveOutcome{ProveStatus::Proved, d}; };

  SECTION("all steps then the goal") {
    ScriptedProver prover({proved("s1"), proved("s2"), proved("s3"), proved("goal")});
    VerificationResult r = verify_solution(stmt, sketch, prover, 777);
    CHECK(r.status == VerifyStatus::Verified);
    CHECK(r.detail == "goal");
    CHECK(r.statement_text == print_statement(stmt));
    CHECK(r.sketch_text == print_sketch(sketch));
    REQUIRE(prover.log.size() == 4);
    CHECK(prover.log[0].hypotheses.size() == 1);
    CHECK(prover.log[1].hypotheses.size() == 2);
    CHECK(prover.log[2].hypotheses.size() == 3);
    CHECK(prover.log[3].hypotheses.size() == 4);
    CHECK(print_formula(prover.log[0].goal) == "x = 5");
    CHECK(print_formula(prover.log[1].hypotheses[1]) == "x = 5");
    CHECK(formula_equal(prover.log[3].goal, stmt.shows));
    for (const auto& task : prover.log) {
      CHECK(task.budget == 777);
      CHECK(task.var_types == stmt.var_types());
    }
  }

  SECTION("a failing step reports its 1-based index and stops") {
    ScriptedProver prover({proved("s1"), ProveOutcome{ProveStatus::Unproved, "nope"}});
    VerificationResult r = verify_solution(stmt, sketch, prover, 100);
    CHECK(r.status == VerifyStatus::StepFailed);
    CHECK(r.failed_step == 2);
    CHECK(r.detail == "nope");
    CHECK(prover.log.size() == 2);
  }

  SECTION("budget exhaustion at a step") {
    ScriptedProver prover({ProveOutcome{ProveStatus::BudgetExhausted, "ran out"}});
    VerificationResult r = verify_solution(stmt, sketch, prover, 100);
    CHECK(r.status == VerifyStatus::BudgetExhausted);
    CHECK(r.detail == "step 1: ran out");
  }

  SECTION("budget exhaustion at the goal") {
    ScriptedProver prover(
        {proved("a"), proved("b"), proved("c"), ProveOutcome{ProveStatus::BudgetExhausted, "slow"}});
    VerificationResult r = verify_solution(stmt, sketch, prover, 100);
    CHECK(r.status == VerifyStatus::BudgetExhausted);
    CHECK(r.detail == "goal: slow");
  }

  SECTION("an unreached goal after clean steps") {
    ScriptedProver prover({proved("a"), proved("b"), proved("c"),
                           ProveOutcome{ProveStatus::Unsupported, "nonlinear product"}});
    VerificationResult r = verify_solution(stmt, sketch, prover, 100);
    CHECK(r.status == VerifyStatus::GoalUnreached);
    CHECK(r.detail == "nonlinear product");
  }

  SECTION("an empty sketch goes straight to the goal") {
    ScriptedProver prover({proved("direct")});
    VerificationResult r = verify_solution(stmt, SolutionSketch{}, prover, 100);
    CHECK(r.status == VerifyStatus::Verified);
    CHECK(r.sketch_text.empty());
    REQUIRE(prover.log.size() == 1);
    CHECK(formula_equal(prover.log[0].goal, stmt.shows));
  }
}

TEST_CASE("verification against the real prover") {
  BuiltinProver prover;
  const auto& cases = fixture_cases();
  FormalStatement right = must_statement(cases[0].statements[1]);
  FormalStatement wrong = must_statement(cases[0].statements[0]);
  SolutionSketch benign = must_sketch(FixtureOracle::benign_sketch(), right);

  CHECK(verify_solution(right, benign, prover, 200000).status == VerifyStatus::Verified);
  CHECK(verify_solution(right, SolutionSketch{}, prover, 200000).status ==
        VerifyStatus::Verified);

  VerificationResult sketch_fail =
      verify_solution(wrong, must_sketch(FixtureOracle::benign_sketch(), wrong), prover, 200000);
  CHECK(sketch_fail.status == VerifyStatus::StepFailed);
  CHECK(sketch_fail.failed_step == 1);

  CHECK(verify_solution(wrong, SolutionSketch{}, prover, 200000).status ==
        VerifyStatus::GoalUnreached);

  SECTION("rational arithmetic statements verify too") {
    FormalStatement avg = must_statement(cases[2].statements[1]);
    CHECK(verify_solution(avg, SolutionSketch{}, prover, 200000).status ==
          VerifyStatus::Verified);
  }
}

TEST_CASE("answer selection prefers verified samples") {
  SECTION("verified minority beats the unverified majority") {
    std::vector<SampleRecord> records = {rec("59", false), rec("56", true), rec("59", false),
                                         rec("61", false)};
    auto got = select_answer(records);
    REQUIRE(got.ok());
    CHECK(canonical_text(got.value().answer) == "56");
    CHECK(got.value().mode == Selection::Mode::VerifiedMajority);
    REQUIRE(got.value().tally.size() == 1);
    CHECK(got.value().tally[0].count == 1);
  }

  SECTION("fallback majority when nothing verified") {
    std::vector<SampleRecord> records = {rec("59", false), rec("56", false), rec("59", false),
                                         rec("61", false)};
    auto got = select_answer(records);
    REQUIRE(got.ok());
    CHECK(canonical_text(got.value().answer) == "59");
    CHECK(got.value().mode == Selection::Mode::FallbackMajority);
    REQUIRE(got.value().tally.size() == 3);
    // tally is sorted by canonical answer order
    CHECK(canonical_text(got.value().tally[0].answer) == "56");
    CHECK(canonical_text(got.value().tally[1].answer) == "59");
    CHECK(got.value().tally[1].count == 2);
    CHECK(canonical_text(got.value().tally[2].answer) == "61");
  }

  SECTION("ties go to the smallest canonical answer") {
    std::vector<SampleRecord> records = {rec("7", true), rec("3", true), rec("7", false)};
    auto got = select_answer(records);
    REQUIRE(got.ok());
    CHECK(canonical_text(got.value().answer) == "3");

    records = {rec("-2", false), rec("1", false)};
    got = select_answer(records);
    REQUIRE(got.ok());
    CHECK(canonical_text(got.value().answer) == "-2");
  }

  SECTION("equivalent answer spellings pool their votes") {
    std::vector<SampleRecord> records = {rec("1/2", false), rec("0.5", false), rec("7", false)};
    auto got = select_answer(records);
    REQUIRE(got.ok());
    CHECK(canonical_text(got.value().answer) == "1/2");
    REQUIRE(got.value().tally.size() == 2);
    CHECK(got.value().tally[0].count == 2);
  }

  SECTION("no extractable answers is an error") {
    std::vector<SampleRecord> records(3);
    auto got = select_answer(records);
    REQUIRE_FALSE(got.ok());
    CHECK(got.error().code == ErrCode::NoAnswers);
    CHECK(select_answer({}).ok() == false);
  }

  SECTION("record order never changes the selection") {
    std::vector<SampleRecord> records = {rec("7", true),  rec("3", true),  rec("9", false),
                                         rec("9", false), rec("9", false), rec("3", false)};
    auto first = select_answer(records);
    REQUIRE(first.ok());
    std::mt19937 shuffler(7);
    for (int i = 0; i < 20; ++i) {
      std::shuffle(records.begin(), records.end(), shuffler);
      auto again = select_answer(records);
      REQUIRE(again.ok());
      CHECK(answers_equal(again.value().answer, first.value().answer));
      CHECK(again.value().mode == first.value().mode);
      REQUIRE(again.value().tally.size() == first.value().tally.size());
      for (std::size_t k = 0; k < first.value().tally.size(); ++k) {
        CHECK(answers_equal(again.value().tally[k].answer, first.value().tally[k].answer));
        CHECK(again.value().tally[k].count == first.value().tally[k].count);
      }
    }
  }
}

TEST_CASE("run_problem honors sampling and verification settings") {
  StubBackend llm;
  BuiltinProver prover;
  DemoPool pool = builtin_demo_pool();
  Problem problem = stub_problem();

  PipelineConfig config = fixture_config();
  config.samples_per_problem = 3;
  config.statement_attempts_per_solution = 2;
  config.sampling.temperature = 0.9;
  config.sampling.nucleus_p = 0.8;
  config.sampling.max_tokens = 256;
  llm.statement_queue = {kStmtA, kStmtB, kStmtA, kStmtB, kStmtA, kStmtB};
  llm.solution_texts = {sol_text("5"), sol_text("5"), sol_text("4")};

  SECTION("the sampling request carries the configured knobs") {
    auto run = run_problem(problem, config, llm, prover, pool);
    REQUIRE(run.ok());
    REQUIRE_FALSE(llm.gen_log.empty());
    const GenRequest& first = llm.gen_log[0];
    CHECK(first.n == 3);
    CHECK(first.temperature == 0.9);
    CHECK(first.nucleus_p == 0.8);
    CHECK(first.max_tokens == 256);
    CHECK(first.prompt.ends_with(std::string(kSolutionCue) + "\n"));
  }

  SECTION("verification stops at the first verified attempt") {
    auto run = run_problem(problem, config, llm, prover, pool);
    REQUIRE(run.ok());
    REQUIRE(run.value().records.size() == 3);
    for (const auto& record : run.value().records) {
      CHECK(record.verified);
      // attempt 0 verified, so attempt 1 was generated but never verified
      CHECK(record.attempts.size() == 1);
    }
    int statement_rows = 0, verify_rows = 0;
    for (const auto& row : run.value().trace) {
      if (row.stage == "statement") ++statement_rows;
      if (row.stage == "verify") ++verify_rows;
    }
    CHECK(statement_rows == 6);
    CHECK(verify_rows == 3);
  }

  SECTION("samples without an extractable answer are carried but inert") {
    llm.solution_texts = {sol_text("5"), "I cannot solve this one.", sol_text("4")};
    auto run = run_problem(problem, config, llm, prover, pool);
    REQUIRE(run.ok());
    REQUIRE(run.value().records.size() == 3);
    CHECK_FALSE(run.value().records[1].answer.has_value());
    CHECK(run.value().records[1].attempts.empty());
    bool saw_no_answer = false;
    for (const auto& row : run.value().trace)
      if (row.stage == "extract" && row.outcome == "no-answer" && row.sample_index == 1)
        saw_no_answer = true;
    CHECK(saw_no_answer);
  }

  SECTION("a sketch that fails to parse marks the attempt, not the run") {
    llm.sketch_text = "this is not a proof";
    config.statement_attempts_per_solution = 1;
    llm.statement_queue = {kStmtA};
    auto run = run_problem(problem, config, llm, prover, pool);
    REQUIRE(run.ok());
    const auto& record = run.value().records[0];
    REQUIRE_FALSE(record.attempts.empty());
    CHECK(record.attempts[0].status == VerifyStatus::FormalizationError);
    CHECK(record.attempts[0].detail.rfind("sketch: ", 0) == 0);
    CHECK_FALSE(record.verified);
    bool saw = false;
    for (const auto& row : run.value().trace)
      if (row.stage == "sketch" && row.outcome == "parse-failed") saw = true;
    CHECK(saw);
    REQUIRE(run.value().selection.has_value());
    CHECK(run.value().selection->mode == Selection::Mode::FallbackMajority);
  }

  SECTION("sketches can be turned off entirely") {
    config.use_sketches = false;
    config.statement_attempts_per_solution = 1;
    llm.statement_queue = {kStmtA};
    auto run = run_problem(problem, config, llm, prover, pool);
    REQUIRE(run.ok());
    CHECK(run.value().records[0].verified);
    for (const auto& row : run.value().trace) CHECK(row.stage != "sketch");
    for (const auto& req : llm.gen_log)
      CHECK_FALSE(req.prompt.ends_with(std::string(kFormalSolutionCue) + "\n"));
  }
}

TEST_CASE("worked examples select the verified minority answer") {
  FixtureOracle oracle;
  BuiltinProver prover;
  DemoPool pool = builtin_demo_pool();
  PipelineConfig config = fixture_config();

  for (const auto& fc : fixture_cases()) {
    INFO("problem " << fc.problem.id);
    auto run = run_problem(fc.problem, config, oracle, prover, pool);
    REQUIRE(run.ok());
    const ProblemRun& r = run.value();
    REQUIRE(r.selection.has_value());
    CHECK(r.selection->mode == Selection::Mode::VerifiedMajority);
    CHECK(canonical_text(r.selection->answer) == canonical_text(canonicalize(fc.problem.ground_truth)));

    // plain majority over the same samples lands on the wrong answer
    auto plain = detail::tally_answers(r.records, false);
    const AnswerCount* best = detail::argmax_tally(plain);
    REQUIRE(best != nullptr);
    CHECK(canonical_text(best->answer) !=
          canonical_text(canonicalize(fc.problem.ground_truth)));

    REQUIRE(r.records.size() == 4);
    CHECK_FALSE(r.records[0].verified);
    CHECK(r.records[1].verified);
    CHECK_FALSE(r.records[2].verified);
    CHECK_FALSE(r.records[3].verified);

    REQUIRE_FALSE(r.records[0].attempts.empty());
    CHECK(r.records[0].attempts[0].status == VerifyStatus::StepFailed);
    CHECK(r.records[1].attempts[0].status == VerifyStatus::Verified);
    CHECK(r.records[2].attempts[0].status == VerifyStatus::Vacuous);
    CHECK(r.records[3].attempts[0].status == VerifyStatus::Unfaithful);

    bool vacuous_row = false, unfaithful_row = false, verified_row = false;
    for (const auto& row : r.trace) {
      CHECK(row.problem_id == fc.problem.id);
      if (row.stage == "filter" && row.outcome == "vacuous") vacuous_row = true;
      if (row.stage == "filter" && row.outcome == "unfaithful") unfaithful_row = true;
      if (row.stage == "verify" && row.outcome == "verified") verified_row = true;
    }
    CHECK(vacuous_row);
    CHECK(unfaithful_row);
    CHECK(verified_row);
  }
}

TEST_CASE("recorded cassette replays the worked examples byte for byte") {
  auto cassette = Cassette::load(std::string(DTV_SOURCE_DIR) + "/data/fixtures/cassette.jsonl");
  REQUIRE(cassette.ok());
  // any change to prompts, digests, or recorded responses shows up here
  CHECK(cassette_digest(cassette.value()) == "d88903021014a4d7778eeacbf078254c");

  CassetteBackend replay(cassette.value(), CassetteMode::Replay);
  BuiltinProver prover;
  DemoPool pool = builtin_demo_pool();

  auto runs = run_many(fixture_problems(), fixture_config(), replay, prover, pool, 1);
  REQUIRE(runs.ok());
  REQUIRE(runs.value().size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const ProblemRun& r = runs.value()[i];
    REQUIRE(r.selection.has_value());
    CHECK(r.selection->mode == Selection::Mode::VerifiedMajority);
    CHECK(canonical_text(r.selection->answer) ==
          canonical_text(canonicalize(fixture_cases()[i].problem.ground_truth)));
  }

  SECTION("replay is strict about unseen prompts") {
    GenRequest unseen;
    unseen.prompt = "never recorded\nSolution:\n";
    auto got = replay.generate(unseen);
    REQUIRE_FALSE(got.ok());
    CHECK(got.error().code == ErrCode::CassetteMiss);
  }

  SECTION("live oracle and cassette agree") {
    FixtureOracle oracle;
    auto live = run_many(fixture_problems(), fixture_config(), oracle, prover, pool, 1);
    REQUIRE(live.ok());
    CHECK(run_fingerprint(live.value()) == run_fingerprint(runs.value()));
  }
}

TEST_CASE("worker count never changes the output") {
  FixtureOracle oracle;
  BuiltinProver prover;
  DemoPool pool = builtin_demo_pool();
  PipelineConfig config = fixture_config();

  auto serial = run_many(fixture_problems(), config, oracle, prover, pool, 1);
  REQUIRE(serial.ok());
  auto parallel = run_many(fixture_problems(), config, oracle, prover, pool, 4);
  REQUIRE(parallel.ok());
  CHECK(run_fingerprint(serial.value()) == run_fingerprint(parallel.value()));
}

TEST_CASE("status and mode names are stable") {
  CHECK(std::string(verify_status_name(VerifyStatus::Verified)) == "verified");
  CHECK(std::string(verify_status_name(VerifyStatus::StepFailed)) == "step-failed");
  CHECK(std::string(verify_status_name(VerifyStatus::GoalUnreached)) == "goal-unreached");
  CHECK(std::string(verify_status_name(VerifyStatus::Vacuous)) == "vacuous");
  CHECK(std::string(verify_status_name(VerifyStatus::Unfaithful)) == "unfaithful");
  CHECK(std::string(verify_status_name(VerifyStatus::FormalizationError)) ==
        "formalization-error");
  CHECK(std::string(verify_status_name(VerifyStatus::BudgetExhausted)) == "budget-exhausted");
  CHECK(std::string(selection_mode_name(Selection::Mode::VerifiedMajority)) ==
        "verified-majority");
  CHECK(std::string(selection_mode_name(Selection::Mode::FallbackMajority)) ==
        "fallback-majority");
}

TEST_CASE("trace rows and verification results serialize with fixed fields") {
  TraceRow row{"p1", 2, 0, "verify", "verified", "abc"};
  Json j = row;
  CHECK(j.size() == 6);
  CHECK(j.at("problem_id") == "p1");
  CHECK(j.at("sample_index") == 2);
  CHECK(j.at("attempt") == 0);
  CHECK(j.at("stage") == "verify");
  CHECK(j.at("outcome") == "verified");
  CHECK(j.at("digest") == "abc");

  VerificationResult vr;
  vr.status = VerifyStatus::StepFailed;
  vr.failed_step = 2;
  vr.detail = "nope";
  vr.statement_text = "theorem ...";
  vr.sketch_text = "proof ...";
  vr.attempt_index = 1;
  Json vj = vr;
  CHECK(vj.size() == 6);
  CHECK(vj.at("status") == "step-failed");
  CHECK(vj.at("failed_step") == 2);
  CHECK(vj.at("detail") == "nope");
  CHECK(vj.at("statement") == "theorem ...");
  CHECK(vj.at("sketch") == "proof ...");
  CHECK(vj.at("attempt") == 1);
}
