#pragma once

// Five worked example problems with a fully scripted backend. Each problem
// gets four sampled solutions where the most common answer is wrong and only
// the minority answer survives verification, so plain voting picks the wrong
// answer while verified voting recovers the right one. The script also
// exercises every filter: one statement per problem is vacuous, one is a
// restatement of the claimed answer (rejected by the critique), and one makes
// a faithful but false claim (fails at the goal).
//
// The oracle answers a request by rebuilding every candidate prompt with the
// same demo pool, rng scopes, and config the pipeline uses, then comparing
// byte-for-byte, so recorded cassettes replay exactly.

#include <array>
#include <string>
#include <vector>

#include "dtv/parser.hpp"
#include "dtv/pipeline.hpp"
#include "dtv/printer.hpp"
#include "dtv/prompts.hpp"

namespace dtv {

struct FixtureCase {
  Problem problem;
  std::array<std::string, 4> claims;      // answer carried by each sampled solution
  std::array<std::string, 4> solutions;   // informal solution texts
  std::array<std::string, 4> statements;  // formal statement completion per sample
  int trivial_sample = 3;                 // the statement the critique rejects
};

inline PipelineConfig fixture_config() {
  PipelineConfig c;
  c.samples_per_problem = 4;
  c.statement_attempts_per_solution = 1;
  c.seed = 2024;
  return c;
}

namespace detail {

inline std::string fixture_solution(const std::string& body, const std::string& answer) {
  return body + " Final Answer: The final answer is $" + answer + "$. I hope it is correct.";
}

inline std::vector<FixtureCase> make_fixture_cases() {
  std::vector<FixtureCase> cases;

  {
    FixtureCase fc;
    fc.problem.id = "herd-heads-humps";
    fc.problem.statement_text =
        "A herd consists of camels and dromedaries. There are 180 heads and 304 bumps. How many "
        "dromedaries are there if camels have two humps each and dromedaries have one hump each?";
    fc.problem.ground_truth = "56";
    fc.problem.dataset = Dataset::Gsm8k;
    fc.claims = {"59", "56", "59", "61"};
    fc.solutions = {
        fixture_solution("Each camel has two humps, so I take 304 - 180 = 124 camels and "
                         "180 - 124 = 56... wait, adjusting for heads gives 59.",
                         "59"),
        fixture_solution("Let c be camels and d dromedaries. Then c + d = 180 and 2c + d = 304. "
                         "Subtracting, c = 124, so d = 180 - 124 = 56.",
                         "56"),
        fixture_solution("304 bumps minus 180 heads leaves 124, and 183 - 124 = 59.", "59"),
        fixture_solution("Half of 304 is 152, and 180 - 152 + 33 = 61.", "61"),
    };
    fc.statements = {
        "theorem\n"
        "  fixes camels dromedaries :: nat\n"
        "  assumes \"camels + dromedaries = 180\"\n"
        "  and \"2 * camels + dromedaries = 304\"\n"
        "  shows \"dromedaries = 59\"",
        "theorem\n"
        "  fixes camels dromedaries :: nat\n"
        "  assumes \"camels + dromedaries = 180\"\n"
        "  and \"2 * camels + dromedaries = 304\"\n"
        "  shows \"dromedaries = 56\"",
        "theorem\n"
        "  fixes camels dromedaries :: nat\n"
        "  assumes \"camels + dromedaries = 180\"\n"
        "  and \"camels + dromedaries = 200\"\n"
        "  shows \"dromedaries = 59\"",
        "theorem\n"
        "  fixes dromedaries :: nat\n"
        "  assumes \"dromedaries = 61\"\n"
        "  shows \"dromedaries = 61\"",
    };
    cases.push_back(std::move(fc));
  }

  {
    FixtureCase fc;
    fc.problem.id = "parabola-coefficients";
    fc.problem.statement_text =
        "A parabola $ax^2+bx+c$ contains the points $(-1,0)$, $(0,5)$, and $(5,0)$. Find the "
        "value $100a+10b+c$.";
    fc.problem.ground_truth = "-55";
    fc.problem.dataset = Dataset::MathAlgebra;
    fc.claims = {"-25", "-55", "-25", "55"};
    fc.solutions = {
        fixture_solution("The roots are -1 and 5, so a(x+1)(x-5) with a = 1 gives c = -5 and "
                         "100 + 10(-4) - 5 hmm, that is -25 after rescaling.",
                         "-25"),
        fixture_solution("From the roots, y = a(x+1)(x-5); at x = 0, -5a = 5 so a = -1, b = 4, "
                         "c = 5. Then 100a + 10b + c = -100 + 40 + 5 = -55.",
                         "-55"),
        fixture_solution("Plugging in the three points and eliminating, I get -25.", "-25"),
        fixture_solution("By symmetry about x = 2 the value must be positive, namely 55.", "55"),
    };
    fc.statements = {
        "theorem\n"
        "  fixes a b c :: real\n"
        "  assumes h0 : \"a * (-1)^2 + b * (-1) + c = 0\"\n"
        "  and h1 : \"a * 0^2 + b * 0 + c = 5\"\n"
        "  and h2 : \"a * 5^2 + b * 5 + c = 0\"\n"
        "  shows \"100 * a + 10 * b + c = -25\"",
        "theorem\n"
        "  fixes a b c :: real\n"
        "  assumes h0 : \"a * (-1)^2 + b * (-1) + c = 0\"\n"
        "  and h1 : \"a * 0^2 + b * 0 + c = 5\"\n"
        "  and h2 : \"a * 5^2 + b * 5 + c = 0\"\n"
        "  shows \"100 * a + 10 * b + c = -55\"",
        "theorem\n"
        "  fixes a :: real\n"
        "  assumes \"a > 1\"\n"
        "  and \"a < 0\"\n"
        "  shows \"100 * a = -25\"",
        "theorem\n"
        "  fixes v :: real\n"
        "  assumes \"v = 55\"\n"
        "  shows \"v = 55\"",
    };
    cases.push_back(std::move(fc));
  }

  {
    FixtureCase fc;
    fc.problem.id = "four-tests-average";
    fc.problem.statement_text =
        "Blake and Jenny each took four 100-point tests. Blake averaged 78 on the four tests. "
        "Jenny scored 10 points higher than Blake on the first test, 10 points lower than him on "
        "the second test, and 20 points higher on both the third and fourth tests. What is the "
        "difference between Jenny's average and Blake's average on these four tests?";
    fc.problem.ground_truth = "10";
    fc.problem.dataset = Dataset::MathPrealgebra;
    fc.claims = {"12", "10", "12", "40"};
    fc.solutions = {
        fixture_solution("Jenny gains 10 - 10 + 20 + 20 = 40 points, but averaging against the "
                         "100-point scale gives 48/4 = 12.",
                         "12"),
        fixture_solution("Jenny's total differs by 10 - 10 + 20 + 20 = 40 points, so the "
                         "averages differ by 40 / 4 = 10.",
                         "10"),
        fixture_solution("The gaps add to 48 and 48 divided by 4 is 12.", "12"),
        fixture_solution("The total gap is 40, so the answer is 40.", "40"),
    };
    fc.statements = {
        "theorem\n"
        "  fixes b1 b2 b3 b4 j1 j2 j3 j4 :: real\n"
        "  assumes \"b1 + b2 + b3 + b4 = 4 * 78\"\n"
        "  and \"j1 = b1 + 10\"\n"
        "  and \"j2 = b2 - 10\"\n"
        "  and \"j3 = b3 + 20\"\n"
        "  and \"j4 = b4 + 20\"\n"
        "  shows \"(j1 + j2 + j3 + j4)/4 - (b1 + b2 + b3 + b4)/4 = 12\"",
        "theorem\n"
        "  fixes b1 b2 b3 b4 j1 j2 j3 j4 :: real\n"
        "  assumes \"b1 + b2 + b3 + b4 = 4 * 78\"\n"
        "  and \"j1 = b1 + 10\"\n"
        "  and \"j2 = b2 - 10\"\n"
        "  and \"j3 = b3 + 20\"\n"
        "  and \"j4 = b4 + 20\"\n"
        "  shows \"(j1 + j2 + j3 + j4)/4 - (b1 + b2 + b3 + b4)/4 = 10\"",
        "theorem\n"
        "  fixes g :: real\n"
        "  assumes \"g > 2\"\n"
        "  and \"g < 1\"\n"
        "  shows \"g = 12\"",
        "theorem\n"
        "  fixes d :: real\n"
        "  assumes \"d = 40\"\n"
        "  shows \"d = 40\"",
    };
    cases.push_back(std::move(fc));
  }

  {
    FixtureCase fc;
    fc.problem.id = "reversed-digits-ages";
    fc.problem.statement_text =
        "Reversing the digits in John's age results in his father's age. The positive difference "
        "between their ages is 27 years. If the sum of the digits in each age is 5, what is the "
        "number of years in John's father's age?";
    fc.problem.ground_truth = "41";
    fc.problem.dataset = Dataset::MathNumTheory;
    fc.claims = {"14", "41", "14", "32"};
    fc.solutions = {
        fixture_solution("Digits sum to 5 and differ by 27, so the ages are 41 and 14; John's "
                         "father must be the younger-looking 14... I mean 14.",
                         "14"),
        fixture_solution("Write John's age as 10j + f and the father's as 10f + j. The "
                         "difference 9(f - j) = 27 gives f - j = 3, and f + j = 5, so f = 4, "
                         "j = 1. The father is 41.",
                         "41"),
        fixture_solution("The pair must be 14 and 41, and John's father is 14.", "14"),
        fixture_solution("Digit sum 5 suggests 32, reversed 23, difference 9. Close enough: 32.",
                         "32"),
    };
    fc.statements = {
        "theorem\n"
        "  fixes j f j1 f1 :: nat\n"
        "  assumes \"j = 10 * j1 + f1\"\n"
        "  and \"f = 10 * f1 + j1\"\n"
        "  and \"f - j = 27\"\n"
        "  and \"j1 + f1 = 5\"\n"
        "  shows \"f = 14\"",
        "theorem\n"
        "  fixes j f j1 f1 :: nat\n"
        "  assumes \"j = 10 * j1 + f1\"\n"
        "  and \"f = 10 * f1 + j1\"\n"
        "  and \"f - j = 27\"\n"
        "  and \"j1 + f1 = 5\"\n"
        "  shows \"f = 41\"",
        "theorem\n"
        "  fixes f :: nat\n"
        "  assumes \"f = 3\"\n"
        "  and \"f = 4\"\n"
        "  shows \"f = 14\"",
        "theorem\n"
        "  fixes f :: nat\n"
        "  assumes \"f = 32\"\n"
        "  shows \"f = 32\"",
    };
    cases.push_back(std::move(fc));
  }

  {
    FixtureCase fc;
    fc.problem.id = "novel-five-days";
    fc.problem.statement_text =
        "It took Lara five days to read a novel. Each day after the first day, Lara read half as "
        "many pages as the day before. If the novel was 248 pages long, how many pages did she "
        "read on the first day?";
    fc.problem.ground_truth = "128";
    fc.problem.dataset = Dataset::MultiArith;
    fc.claims = {"124", "128", "124", "80"};
    fc.solutions = {
        fixture_solution("248 over five days halving each day is roughly 248/2 = 124 on the "
                         "first day.",
                         "124"),
        fixture_solution("Let the first day be p. Then p + p/2 + p/4 + p/8 + p/16 = 248, so "
                         "31p/16 = 248 and p = 128.",
                         "128"),
        fixture_solution("Half of the book on day one: 124 pages.", "124"),
        fixture_solution("Five equal days of 49.6 rounds to 80 for the first day.", "80"),
    };
    fc.statements = {
        "theorem\n"
        "  fixes p1 p2 p3 p4 p5 :: nat\n"
        "  assumes \"p1 + p2 + p3 + p4 + p5 = 248\"\n"
        "  and \"p2 = p1 / 2\"\n"
        "  and \"p3 = p2 / 2\"\n"
        "  and \"p4 = p3 / 2\"\n"
        "  and \"p5 = p4 / 2\"\n"
        "  shows \"p1 = 124\"",
        "theorem\n"
        "  fixes p1 p2 p3 p4 p5 :: nat\n"
        "  assumes \"p1 + p2 + p3 + p4 + p5 = 248\"\n"
        "  and \"p2 = p1 / 2\"\n"
        "  and \"p3 = p2 / 2\"\n"
        "  and \"p4 = p3 / 2\"\n"
        "  and \"p5 = p4 / 2\"\n"
        "  shows \"p1 = 128\"",
        "theorem\n"
        "  fixes p1 :: nat\n"
        "  assumes \"p1 < 5\"\n"
        "  and \"p1 > 9\"\n"
        "  shows \"p1 = 124\"",
        "theorem\n"
        "  fixes p1 :: nat\n"
        "  assumes \"p1 = 80\"\n"
        "  shows \"p1 = 80\"",
    };
    cases.push_back(std::move(fc));
  }

  return cases;
}

}  // namespace detail

inline const std::vector<FixtureCase>& fixture_cases() {
  static const std::vector<FixtureCase> cases = detail::make_fixture_cases();
  return cases;
}

inline std::vector<Problem> fixture_problems() {
  std::vector<Problem> out;
  for (const auto& fc : fixture_cases()) out.push_back(fc.problem);
  return out;
}

class FixtureOracle : public LlmBackend {
 public:
  FixtureOracle()
      : config_(fixture_config()), pool_(builtin_demo_pool()), cases_(fixture_cases()) {
    for (const auto& fc : cases_) {
      std::array<std::string, 4> printed;
      for (int s = 0; s < 4; ++s) {
        auto parsed = parse_statement(fc.statements[static_cast<std::size_t>(s)]);
        if (!parsed.ok())
          throw std::runtime_error("fixture statement does not parse: " +
                                   parsed.error().render());
        printed[static_cast<std::size_t>(s)] = print_statement(parsed.value());
      }
      printed_.push_back(printed);
    }
  }

  std::string name() const override { return "fixture-oracle"; }

  Result<std::vector<std::string>> generate(const GenRequest& req) override {
    const std::string formal_solution_cue = std::string(kFormalSolutionCue) + "\n";
    const std::string formal_statement_cue = std::string(kFormalStatementCue) + "\n";
    const std::string solution_cue = std::string(kSolutionCue) + "\n";

    if (req.prompt.ends_with(formal_solution_cue)) {
      for (std::size_t k = 0; k < cases_.size(); ++k) {
        const auto& fc = cases_[k];
        for (int s = 0; s < 4; ++s)
          for (int a = 0; a < config_.statement_attempts_per_solution; ++a) {
            Rng rng = derive_rng(config_.seed, "sketch:" + fc.problem.id + ":" +
                                                   std::to_string(s) + ":" + std::to_string(a));
            auto candidate = build_solution_prompt(
                fc.problem, canonicalize(fc.claims[static_cast<std::size_t>(s)]),
                printed_[k][static_cast<std::size_t>(s)],
                fc.solutions[static_cast<std::size_t>(s)], pool_, rng, config_);
            if (candidate.ok() && candidate.value() == req.prompt)
              return std::vector<std::string>{benign_sketch()};
          }
      }
      return Error{ErrCode::BackendError, "fixture oracle: unknown sketch prompt"};
    }

    if (req.prompt.ends_with(formal_statement_cue)) {
      for (const auto& fc : cases_) {
        for (int s = 0; s < 4; ++s)
          for (int a = 0; a < config_.statement_attempts_per_solution; ++a) {
            Rng rng = derive_rng(config_.seed, "statement:" + fc.problem.id + ":" +
                                                   std::to_string(s) + ":" + std::to_string(a));
            auto candidate = build_statement_prompt(
                fc.problem, canonicalize(fc.claims[static_cast<std::size_t>(s)]), pool_, rng,
                config_);
            if (candidate.ok() && candidate.value() == req.prompt)
              return std::vector<std::string>{fc.statements[static_cast<std::size_t>(s)]};
          }
      }
      return Error{ErrCode::BackendError, "fixture oracle: unknown statement prompt"};
    }

    if (req.prompt.ends_with(solution_cue)) {
      for (const auto& fc : cases_) {
        if (build_sampling_prompt(fc.problem, pool_) != req.prompt) continue;
        if (req.n != 4)
          return Error{ErrCode::BackendError, "fixture oracle: expected n = 4 samples"};
        return std::vector<std::string>(fc.solutions.begin(), fc.solutions.end());
      }
      return Error{ErrCode::BackendError, "fixture oracle: unknown sampling prompt"};
    }
    return Error{ErrCode::BackendError, "fixture oracle: unrecognized prompt shape"};
  }

  Result<std::vector<double>> score(const ScoreRequest& req) override {
    for (std::size_t k = 0; k < cases_.size(); ++k) {
      const auto& trivial =
          printed_[k][static_cast<std::size_t>(cases_[k].trivial_sample)];
      if (req.prompt.find(std::string(kFormalStatementCue) + "\n" + trivial) !=
          std::string::npos)
        return std::vector<double>{-2.0, -1.0};
    }
    return std::vector<double>{-1.0, -2.0};
  }

  static std::string benign_sketch() {
    return "proof -\n  show ?thesis using assms by auto\nqed";
  }

 private:
  PipelineConfig config_;
  DemoPool pool_;
  std::vector<FixtureCase> cases_;
  std::vector<std::array<std::string, 4>> printed_;
};

}  // namespace dtv
