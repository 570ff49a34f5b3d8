#pragma once

// Few-shot prompt construction. The demo pool carries four kinds of
// demonstrations: informal solution sampling, statement formalization
// (informal/formal pairs), solution formalization (4-tuples), and critique
// (faithful/unfaithful verdicts with reasons). Statement prompts draw and
// permute a random subset excluding the target problem; the critique prompt
// is fixed. All built-in formal texts parse under the restricted language,
// which the test suite asserts.

#include <string>
#include <vector>

#include "dtv/answers.hpp"
#include "dtv/core.hpp"
#include "dtv/rng.hpp"

namespace dtv {

inline constexpr const char* kProblemCue = "Problem:";
inline constexpr const char* kSolutionCue = "Solution:";
inline constexpr const char* kInformalStatementCue = "Informal Statement:";
inline constexpr const char* kFormalStatementCue = "Formal Statement:";
inline constexpr const char* kInformalSolutionCue = "Informal Solution:";
inline constexpr const char* kFormalSolutionCue = "Formal Solution:";
inline constexpr const char* kCritiqueQuestion =
    "Question: Is the formal statement a faithful translation of the informal statement?";
inline constexpr const char* kAnswerCue = "Answer:";
inline constexpr const char* kYesPrefix = "Yes,";
inline constexpr const char* kNoPrefix = "No,";

struct SamplingDemo {
  std::string problem;
  std::string solution;
};

struct StatementDemo {
  std::string id;
  Dataset dataset = Dataset::Gsm8k;
  std::string informal;  // includes the "Show that it is …." suffix
  std::string formal;
};

struct SolutionDemo {
  std::string id;
  Dataset dataset = Dataset::Gsm8k;
  std::string informal_statement;
  std::string formal_statement;
  std::string informal_solution;
  std::string formal_sketch;  // statement + proof block
};

struct CritiqueDemo {
  std::string informal;
  std::string formal;
  bool faithful = true;
  std::string answer;  // starts with "Yes," or "No,"
};

struct DemoPool {
  std::vector<SamplingDemo> sampling;
  std::vector<StatementDemo> statements;
  std::vector<SolutionDemo> solutions;
  std::vector<CritiqueDemo> critiques;
};

inline void to_json(Json& j, const SamplingDemo& d) {
  j = Json{{"problem", d.problem}, {"solution", d.solution}};
}
inline void from_json(const Json& j, SamplingDemo& d) {
  j.at("problem").get_to(d.problem);
  j.at("solution").get_to(d.solution);
}

inline void to_json(Json& j, const StatementDemo& d) {
  j = Json{{"id", d.id},
           {"dataset", dataset_name(d.dataset)},
           {"informal", d.informal},
           {"formal", d.formal}};
}
inline void from_json(const Json& j, StatementDemo& d) {
  j.at("id").get_to(d.id);
  auto ds = dataset_from_name(j.at("dataset").get<std::string>());
  if (!ds) throw std::runtime_error("unknown dataset tag in statement demo");
  d.dataset = *ds;
  j.at("informal").get_to(d.informal);
  j.at("formal").get_to(d.formal);
}

inline void to_json(Json& j, const SolutionDemo& d) {
  j = Json{{"id", d.id},
           {"dataset", dataset_name(d.dataset)},
           {"informal_statement", d.informal_statement},
           {"formal_statement", d.formal_statement},
           {"informal_solution", d.informal_solution},
           {"formal_sketch", d.formal_sketch}};
}
inline void from_json(const Json& j, SolutionDemo& d) {
  j.at("id").get_to(d.id);
  auto ds = dataset_from_name(j.at("dataset").get<std::string>());
  if (!ds) throw std::runtime_error("unknown dataset tag in solution demo");
  d.dataset = *ds;
  j.at("informal_statement").get_to(d.informal_statement);
  j.at("formal_statement").get_to(d.formal_statement);
  j.at("informal_solution").get_to(d.informal_solution);
  j.at("formal_sketch").get_to(d.formal_sketch);
}

inline void to_json(Json& j, const CritiqueDemo& d) {
  j = Json{{"informal", d.informal},
           {"formal", d.formal},
           {"faithful", d.faithful},
           {"answer", d.answer}};
}
inline void from_json(const Json& j, CritiqueDemo& d) {
  j.at("informal").get_to(d.informal);
  j.at("formal").get_to(d.formal);
  j.at("faithful").get_to(d.faithful);
  j.at("answer").get_to(d.answer);
}

inline void to_json(Json& j, const DemoPool& p) {
  j = Json{{"sampling", p.sampling},
           {"statements", p.statements},
           {"solutions", p.solutions},
           {"critiques", p.critiques}};
}
inline void from_json(const Json& j, DemoPool& p) {
  j.at("sampling").get_to(p.sampling);
  j.at("statements").get_to(p.statements);
  j.at("solutions").get_to(p.solutions);
  j.at("critiques").get_to(p.critiques);
}

// The informal statement as the formalizer sees it: answer appended in the
// fixed goal phrasing.
inline std::string augmented_statement(const std::string& statement_text,
                                       const std::string& answer_text) {
  return statement_text + " Show that it is " + answer_text + ".";
}

// ---------------------------------------------------------------------------
// Builders

inline std::string build_sampling_prompt(const Problem& problem, const DemoPool& pool) {
  std::string out;
  for (const auto& d : pool.sampling) {
    out += std::string(kProblemCue) + "\n" + d.problem + "\n";
    out += std::string(kSolutionCue) + "\n" + d.solution + "\n\n";
  }
  out += std::string(kProblemCue) + "\n" + problem.statement_text + "\n";
  out += std::string(kSolutionCue) + "\n";
  return out;
}

inline Result<std::string> build_statement_prompt(const Problem& problem, const Answer& answer,
                                                  const DemoPool& pool, Rng& rng,
                                                  const PipelineConfig& config) {
  std::string target_informal = augmented_statement(problem.statement_text, canonical_text(answer));
  std::vector<const StatementDemo*> eligible;
  for (const auto& d : pool.statements)
    if (d.id != problem.id && d.informal != target_informal) eligible.push_back(&d);
  auto k = static_cast<std::size_t>(config.demos_per_statement_prompt);
  if (eligible.size() < k)
    return Error{ErrCode::PoolTooSmall,
                 "statement demo pool has " + std::to_string(eligible.size()) +
                     " eligible entries, need " + std::to_string(k)};
  auto picks = rng.sample_indices(eligible.size(), k);

  std::string out;
  for (std::size_t i : picks) {
    out += std::string(kInformalStatementCue) + "\n" + eligible[i]->informal + "\n";
    out += std::string(kFormalStatementCue) + "\n" + eligible[i]->formal + "\n\n";
  }
  out += std::string(kInformalStatementCue) + "\n" + target_informal + "\n";
  out += std::string(kFormalStatementCue) + "\n";
  return out;
}

inline Result<std::string> build_solution_prompt(const Problem& problem, const Answer& answer,
                                                 const std::string& formal_statement,
                                                 const std::string& informal_solution,
                                                 const DemoPool& pool, Rng& rng,
                                                 const PipelineConfig& config) {
  std::vector<const SolutionDemo*> eligible;
  for (const auto& d : pool.solutions)
    if (d.id != problem.id) eligible.push_back(&d);
  auto k = static_cast<std::size_t>(config.demos_per_solution_prompt);
  if (eligible.size() < k)
    return Error{ErrCode::PoolTooSmall,
                 "solution demo pool has " + std::to_string(eligible.size()) +
                     " eligible entries, need " + std::to_string(k)};
  auto picks = rng.sample_indices(eligible.size(), k);

  std::string out;
  for (std::size_t i : picks) {
    const auto& d = *eligible[i];
    out += std::string(kInformalStatementCue) + "\n" + d.informal_statement + "\n";
    out += std::string(kFormalStatementCue) + "\n" + d.formal_statement + "\n";
    out += std::string(kInformalSolutionCue) + "\n" + d.informal_solution + "\n";
    out += std::string(kFormalSolutionCue) + "\n" + d.formal_sketch + "\n\n";
  }
  out += std::string(kInformalStatementCue) + "\n" +
         augmented_statement(problem.statement_text, canonical_text(answer)) + "\n";
  out += std::string(kFormalStatementCue) + "\n" + formal_statement + "\n";
  out += std::string(kInformalSolutionCue) + "\n" + informal_solution + "\n";
  out += std::string(kFormalSolutionCue) + "\n";
  return out;
}

// Fixed demos, no randomness: the demonstration set is kept identical for
// every critique query.
inline std::string build_critique_prompt(const std::string& informal_statement,
                                         const std::string& formal_statement,
                                         const DemoPool& pool) {
  std::string out;
  for (const auto& d : pool.critiques) {
    out += std::string(kInformalStatementCue) + "\n" + d.informal + "\n";
    out += std::string(kFormalStatementCue) + "\n" + d.formal + "\n";
    out += std::string(kCritiqueQuestion) + "\n";
    out += std::string(kAnswerCue) + " " + d.answer + "\n\n";
  }
  out += std::string(kInformalStatementCue) + "\n" + informal_statement + "\n";
  out += std::string(kFormalStatementCue) + "\n" + formal_statement + "\n";
  out += std::string(kCritiqueQuestion) + "\n";
  out += kAnswerCue;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in pool: 25 statement demos, 10 solution demos, 5 faithful plus 5
// unfaithful critique demos, and a handful of sampling demos.

const DemoPool& builtin_demo_pool();

namespace detail {

inline DemoPool make_builtin_pool() {
  DemoPool p;

  p.sampling = {
      {"What is 6 * 7?",
       "We multiply 6 by 7 to get 42. Final Answer: The final answer is $42$. I hope it is "
       "correct."},
      {"Lisa has 11 apples and eats 4. How many are left?",
       "Subtracting, 11 - 4 = 7. Final Answer: The final answer is $7$. I hope it is correct."},
      {"What is one half of 18?",
       "Half of 18 is 18 / 2 = 9. Final Answer: The final answer is $9$. I hope it is correct."},
  };

  auto sd = [&](const char* id, Dataset ds, const char* informal, const char* formal) {
    p.statements.push_back({id, ds, informal, formal});
  };

  sd("sd01", Dataset::Gsm8k,
     "Janet's ducks lay 16 eggs per day. She eats 3 for breakfast and uses 4 for baking, then "
     "sells the rest at 2 dollars each. How many dollars does she make daily? Show that it is 18.",
     "theorem\n  fixes r :: nat\n  assumes \"r = 2 * ((16 - 3) - 4)\"\n  shows \"r = 18\"");
  sd("sd02", Dataset::Gsm8k,
     "A robe takes 2 bolts of blue fiber and half that much white fiber. How many bolts in total "
     "does it take? Show that it is 3.",
     "theorem\n  fixes b w :: nat\n  assumes \"b = 2\"\n    and \"2 * w = b\"\n  shows \"b + w = "
     "3\"");
  sd("sd03", Dataset::Gsm8k,
     "Mark has 3 boxes with 24 pencils each. He gives away 10 pencils. How many pencils does he "
     "keep? Show that it is 62.",
     "theorem\n  fixes p :: nat\n  assumes \"p = 3 * 24 - 10\"\n  shows \"p = 62\"");
  sd("sd04", Dataset::Gsm8k,
     "A farmer sells 15 crates of apples for 4 dollars a crate. How many dollars does he earn? "
     "Show that it is 60.",
     "theorem\n  fixes d :: nat\n  assumes \"d = 15 * 4\"\n  shows \"d = 60\"");
  sd("sd05", Dataset::Gsm8k,
     "Tom reads 12 pages every morning and 8 every evening. How many pages does he read in a "
     "week? Show that it is 140.",
     "theorem\n  fixes p :: nat\n  assumes \"p = 7 * (12 + 8)\"\n  shows \"p = 140\"");
  sd("sd06", Dataset::Gsm8k,
     "Sara bakes 48 cookies and packs them into bags of 6. How many bags does she fill? Show "
     "that it is 8.",
     "theorem\n  fixes b :: nat\n  assumes \"b = 48 div 6\"\n  shows \"b = 8\"");
  sd("sd07", Dataset::Gsm8k,
     "Lucy has 5 times as many stickers as Ben. Together they have 72. How many does Lucy have? "
     "Show that it is 60.",
     "theorem\n  fixes l b :: nat\n  assumes \"l = 5 * b\"\n    and \"l + b = 72\"\n  shows \"l = "
     "60\"");
  sd("sd08", Dataset::MultiArith,
     "There are 64 students and 4 buses. How many students ride each bus if they split evenly? "
     "Show that it is 16.",
     "theorem\n  fixes s :: nat\n  assumes \"4 * s = 64\"\n  shows \"s = 16\"");
  sd("sd09", Dataset::MultiArith,
     "Paul had 28 marbles, lost 7, then found 13 more. How many marbles does he have now? Show "
     "that it is 34.",
     "theorem\n  fixes m :: nat\n  assumes \"m = 28 - 7 + 13\"\n  shows \"m = 34\"");
  sd("sd10", Dataset::MultiArith,
     "Each shelf holds 9 books. How many books fit on 11 shelves? Show that it is 99.",
     "theorem \"9 * (11::nat) = 99\"");
  sd("sd11", Dataset::MathPrealgebra,
     "What is 20% of 450? Show that it is 90.",
     "theorem\n  fixes x :: real\n  assumes \"x = 450 * 20 / 100\"\n  shows \"x = 90\"");
  sd("sd12", Dataset::MathPrealgebra,
     "Calculate $3!(2^3+\\sqrt{9})\\div 2$. Show that it is 33.",
     "theorem \"fact 3 * (2 ^ 3 + sqrt 9) / 2 = 33\"");
  sd("sd13", Dataset::MathPrealgebra,
     "What is the greatest common divisor of 84 and 60? Show that it is 12.",
     "theorem \"gcd 84 60 = (12::nat)\"");
  sd("sd14", Dataset::MathPrealgebra,
     "The sum of three consecutive integers is 51. What is the smallest of them? Show that it is "
     "16.",
     "theorem\n  fixes n :: int\n  assumes \"n + (n + 1) + (n + 2) = 51\"\n  shows \"n = 16\"");
  sd("sd15", Dataset::MathPrealgebra,
     "A rectangle is twice as long as it is wide and its perimeter is 36. What is its width? "
     "Show that it is 6.",
     "theorem\n  fixes w l :: real\n  assumes \"l = 2 * w\"\n    and \"2 * (l + w) = 36\"\n  "
     "shows \"w = 6\"");
  sd("sd16", Dataset::MathAlgebra,
     "If $f(x) = 3x + 2$, what is $f(7)$? Show that it is 23.",
     "theorem\n  fixes y :: int\n  assumes \"y = 3 * 7 + 2\"\n  shows \"y = 23\"");
  sd("sd17", Dataset::MathAlgebra,
     "If three flicks are equivalent to eight flecks, and six flocks are equivalent to four "
     "flecks, how many flocks are equivalent to 12 flicks? Show that it is 48.",
     "theorem\n  fixes flick fleck flock :: real\n  assumes \"flick > 0\"\n    and \"flock > "
     "0\"\n    and \"fleck > 0\"\n    and \"3 * flick = 8 * fleck\"\n    and \"6 * flock = 4 * "
     "fleck\"\n  shows \"48 * flock = 12 * flick\"");
  sd("sd18", Dataset::MathAlgebra,
     "Solve for x: $5x - 9 = 26$. Show that it is 7.",
     "theorem\n  fixes x :: real\n  assumes \"5 * x - 9 = 26\"\n  shows \"x = 7\"");
  sd("sd19", Dataset::MathAlgebra,
     "The difference of two numbers is 9 and their sum is 41. What is the larger number? Show "
     "that it is 25.",
     "theorem\n  fixes a b :: real\n  assumes \"a - b = 9\"\n    and \"a + b = 41\"\n  shows \"a "
     "= 25\"");
  sd("sd20", Dataset::MathAlgebra,
     "What is the positive square root of 196? Show that it is 14.",
     "theorem \"sqrt 196 = 14\"");
  sd("sd21", Dataset::MathAlgebra,
     "Evaluate $2^{10} / 2^6$. Show that it is 16.",
     "theorem \"(2::real) ^ 10 / 2 ^ 6 = 16\"");
  sd("sd22", Dataset::MathNumTheory,
     "What is the remainder when 2013 is divided by 7? Show that it is 4.",
     "theorem \"2013 mod 7 = (4::nat)\"");
  sd("sd23", Dataset::MathNumTheory,
     "What is the least common multiple of 4 and 6? Show that it is 12.",
     "theorem \"lcm 4 6 = (12::nat)\"");
  sd("sd24", Dataset::MathNumTheory,
     "What is the remainder when 17 is divided by 5? Show that it is 2.",
     "theorem \"17 mod 5 = (2::nat)\"");
  sd("sd25", Dataset::MathNumTheory,
     "What is the product of the least common multiple and the greatest common divisor of 12 and "
     "18? Show that it is 216.",
     "theorem \"lcm 12 18 * gcd 12 18 = (216::nat)\"");

  auto pd = [&](const char* id, Dataset ds, const char* istmt, const char* fstmt,
                const char* isol, const char* fsol) {
    p.solutions.push_back({id, ds, istmt, fstmt, isol, fsol});
  };

  pd("pd01", Dataset::MathPrealgebra,
     "A meal consists of one of 5 appetizers, one of 8 entrees and one of 4 desserts. How many "
     "different meals can be formed? Show that it is 160.",
     "theorem\n  fixes m :: nat\n  assumes \"m = 5 * 8 * 4\"\n  shows \"m = 160\"",
     "We multiply the choices: $5 \\cdot 8 = 40$ and $40 \\cdot 4 = 160$. Final Answer: The "
     "final answer is $160$. I hope it is correct.",
     "theorem\n  fixes m :: nat\n  assumes \"m = 5 * 8 * 4\"\n  shows \"m = 160\"\nproof -\n  (* "
     "We multiply the choices. *)\n  have \"m = 40 * 4\" using assms by auto  [ATP]\n  also have "
     "\"\\<dots> = 160\" by simp  [ATP]\n  finally show ?thesis by auto  [ATP]\nqed");
  pd("pd02", Dataset::Gsm8k,
     "John is 4 years older than Mary. The sum of their ages is 28. How old is John? Show that "
     "it is 16.",
     "theorem\n  fixes j m :: nat\n  assumes \"j = m + 4\"\n    and \"j + m = 28\"\n  shows \"j "
     "= 16\"",
     "Substituting, $m + 4 + m = 28$, so $2m = 24$ and $m = 12$. Then John is $12 + 4 = 16$. "
     "Final Answer: The final answer is $16$. I hope it is correct.",
     "theorem\n  fixes j m :: nat\n  assumes \"j = m + 4\"\n    and \"j + m = 28\"\n  shows \"j "
     "= 16\"\nproof -\n  (* Substituting the first equation into the second. *)\n  have \"2 * m "
     "+ 4 = 28\" using assms by auto  [ATP]\n  (* so 2m = 24 and m = 12 *)\n  then have \"m = "
     "12\" by arith  [ATP]\n  then have \"j = 12 + 4\" using assms by simp  [ATP]\n  then show "
     "?thesis by auto  [ATP]\nqed");
  pd("pd03", Dataset::MathPrealgebra,
     "A jacket costs 80 dollars and is discounted 25%. What is the sale price? Show that it is "
     "60.",
     "theorem\n  fixes p :: real\n  assumes \"p = 80 - 80 * 25 / 100\"\n  shows \"p = 60\"",
     "25% of 80 is 20, so the price is $80 - 20 = 60$. Final Answer: The final answer is $60$. "
     "I hope it is correct.",
     "theorem\n  fixes p :: real\n  assumes \"p = 80 - 80 * 25 / 100\"\n  shows \"p = "
     "60\"\nproof -\n  (* 25% of 80 is 20. *)\n  have \"80 * 25 / 100 = (20::real)\" by auto  "
     "[ATP]\n  then have \"p = 80 - 20\" using assms by auto  [ATP]\n  then show ?thesis by simp "
     " [ATP]\nqed");
  pd("pd04", Dataset::MathAlgebra,
     "A train travels 180 miles in 3 hours. At that rate, how far does it travel in 5 hours? "
     "Show that it is 300.",
     "theorem\n  fixes r d :: real\n  assumes \"r = 180 / 3\"\n    and \"d = r * 5\"\n  shows "
     "\"d = 300\"",
     "The rate is $180/3 = 60$ miles per hour. In 5 hours it travels $60 \\cdot 5 = 300$ miles. "
     "Final Answer: The final answer is $300$. I hope it is correct.",
     "theorem\n  fixes r d :: real\n  assumes \"r = 180 / 3\"\n    and \"d = r * 5\"\n  shows "
     "\"d = 300\"\nproof -\n  have \"r = 60\" using assms by auto  [ATP]\n  then have \"d = 60 * "
     "5\" using assms by auto  [ATP]\n  also have \"\\<dots> = 300\" by simp  [ATP]\n  finally "
     "show ?thesis by auto  [ATP]\nqed");
  pd("pd05", Dataset::MathNumTheory,
     "What is the remainder when 123 is divided by 11? Show that it is 2.",
     "theorem \"123 mod 11 = (2::nat)\"",
     "Since $11 \\cdot 11 = 121$, we have $123 = 11 \\cdot 11 + 2$, so the remainder is 2. "
     "Final Answer: The final answer is $2$. I hope it is correct.",
     "theorem \"123 mod 11 = (2::nat)\"\nproof -\n  (* 11 * 11 = 121 *)\n  have \"123 = 11 * 11 "
     "+ (2::nat)\" by simp  [ATP]\n  then show ?thesis by auto  [ATP]\nqed");
  pd("pd06", Dataset::MathNumTheory,
     "The greatest common divisor of two numbers is 6 and their least common multiple is 36. If "
     "one number is 12, what is the other? Show that it is 18.",
     "theorem\n  fixes x y :: nat\n  assumes \"gcd x y = 6\"\n    and \"lcm x y = 36\"\n    and "
     "\"x = 12\"\n  shows \"y = 18\"",
     "The product of two numbers equals the product of their gcd and lcm: $6 \\cdot 36 = 216$. "
     "Dividing by 12 gives 18. Final Answer: The final answer is $18$. I hope it is correct.",
     "theorem\n  fixes x y :: nat\n  assumes \"gcd x y = 6\"\n    and \"lcm x y = 36\"\n    and "
     "\"x = 12\"\n  shows \"y = 18\"\nproof -\n  (* The product equals gcd times lcm. *)\n  have "
     "\"x * y = 6 * 36\" using assms by simp  [ATP]\n  then have \"12 * y = 216\" using assms by "
     "auto  [ATP]\n  then show ?thesis by arith  [ATP]\nqed");
  pd("pd07", Dataset::MathAlgebra,
     "A square has perimeter 48. What is its area? Show that it is 144.",
     "theorem\n  fixes s a :: real\n  assumes \"4 * s = 48\"\n    and \"a = s * s\"\n  shows "
     "\"a = 144\"",
     "Each side is $48/4 = 12$, so the area is $12 \\cdot 12 = 144$. Final Answer: The final "
     "answer is $144$. I hope it is correct.",
     "theorem\n  fixes s a :: real\n  assumes \"4 * s = 48\"\n    and \"a = s * s\"\n  shows "
     "\"a = 144\"\nproof -\n  have \"s = 12\" using assms by auto  [ATP]\n  then have \"a = 12 * "
     "12\" using assms by simp  [ATP]\n  also have \"\\<dots> = 144\" by simp  [ATP]\n  finally "
     "show ?thesis by auto  [ATP]\nqed");
  pd("pd08", Dataset::MathPrealgebra,
     "The sum of two consecutive integers is 45. What is the smaller one? Show that it is 22.",
     "theorem\n  fixes n :: int\n  assumes \"n + (n + 1) = 45\"\n  shows \"n = 22\"",
     "Combining terms gives $2n + 1 = 45$, so $2n = 44$ and $n = 22$. Final Answer: The final "
     "answer is $22$. I hope it is correct.",
     "theorem\n  fixes n :: int\n  assumes \"n + (n + 1) = 45\"\n  shows \"n = 22\"\nproof -\n  "
     "(* Combining terms gives 2n + 1 = 45. *)\n  have \"2 * n + 1 = 45\" using assms by auto  "
     "[ATP]\n  then have \"2 * n = 44\" by arith  [ATP]\n  then show ?thesis by auto  [ATP]\nqed");
  pd("pd09", Dataset::MultiArith,
     "A factory fills 6 crates every hour. How many crates does it fill in an 8 hour shift? "
     "Show that it is 48.",
     "theorem\n  fixes c :: nat\n  assumes \"c = 6 * 8\"\n  shows \"c = 48\"",
     "Multiplying the rate by the hours, $6 \\cdot 8 = 48$. Final Answer: The final answer is "
     "$48$. I hope it is correct.",
     "theorem\n  fixes c :: nat\n  assumes \"c = 6 * 8\"\n  shows \"c = 48\"\nproof -\n  show "
     "?thesis using assms by auto  [ATP]\nqed");
  pd("pd10", Dataset::Gsm8k,
     "A population of 500 grows by 10%. What is the new population? Show that it is 550.",
     "theorem\n  fixes p :: real\n  assumes \"p = 500 + 500 * 10 / 100\"\n  shows \"p = 550\"",
     "10% of 500 is 50, so the new population is $500 + 50 = 550$. Final Answer: The final "
     "answer is $550$. I hope it is correct.",
     "theorem\n  fixes p :: real\n  assumes \"p = 500 + 500 * 10 / 100\"\n  shows \"p = "
     "550\"\nproof -\n  (* 10% of 500 is 50. *)\n  have \"500 * 10 / 100 = (50::real)\" by auto "
     " [ATP]\n  then show ?thesis using assms by auto  [ATP]\nqed");

  auto cd = [&](const char* informal, const char* formal, bool faithful, const char* answer) {
    p.critiques.push_back({informal, formal, faithful, answer});
  };

  cd("Solve for x: $5x - 9 = 26$. Show that it is 7.",
     "theorem\n  fixes x :: real\n  assumes \"5 * x - 9 = 26\"\n  shows \"x = 7\"", true,
     "Yes, the equation and the goal match the informal statement.");
  cd("A box holds 12 eggs. How many eggs are in 7 boxes? Show that it is 84.",
     "theorem\n  fixes e :: nat\n  assumes \"e = 12 * 7\"\n  shows \"e = 84\"", true,
     "Yes, the formal statement multiplies 12 by 7 and asserts the stated answer.");
  cd("What is the remainder when 17 is divided by 5? Show that it is 2.",
     "theorem \"17 mod 5 = (2::nat)\"", true,
     "Yes, the formal statement computes exactly the required remainder.");
  cd("The difference of two numbers is 9 and their sum is 41. What is the larger number? Show "
     "that it is 25.",
     "theorem\n  fixes a b :: real\n  assumes \"a - b = 9\"\n    and \"a + b = 41\"\n  shows "
     "\"a = 25\"",
     true, "Yes, both given conditions appear as assumptions and the goal asks for the larger "
           "number.");
  cd("A rectangle is twice as long as it is wide and its perimeter is 36. What is its width? "
     "Show that it is 6.",
     "theorem\n  fixes w l :: real\n  assumes \"l = 2 * w\"\n    and \"2 * (l + w) = 36\"\n  "
     "shows \"w = 6\"",
     true, "Yes, the length and perimeter relations are both captured.");
  cd("The square of a number is 4. What is the positive value of the number? Show that it is 2.",
     "theorem\n  fixes x :: real\n  assumes \"x * x = 4\"\n  shows \"x = 2\"", false,
     "No, the formal statement omits the positivity constraint, so x = -2 also satisfies the "
     "assumptions.");
  cd("What is $8 + 5$? Show that it is 13.",
     "theorem\n  fixes s :: nat\n  assumes \"s = 13\"\n  shows \"s = 13\"", false,
     "No, the formal statement assumes the answer instead of the computation 8 + 5.");
  cd("Tom reads 12 pages every morning and 8 every evening. How many pages does he read in a "
     "week? Show that it is 140.",
     "theorem\n  fixes p :: nat\n  assumes \"p = 7 * (12 + 9)\"\n  shows \"p = 140\"", false,
     "No, the evening count 8 was translated as 9.");
  cd("What is 20% of 450? Show that it is 90.", "theorem \"gcd 4 6 = (2::nat)\"", false,
     "No, the formal statement is unrelated to the percentage computation.");
  cd("A number increased by 3 equals 10. What is the number? Show that it is 7.",
     "theorem\n  fixes n :: real\n  assumes \"n - 3 = 10\"\n  shows \"n = 7\"", false,
     "No, increased by 3 must be n + 3, not n - 3.");

  return p;
}

}  // namespace detail

inline const DemoPool& builtin_demo_pool() {
  static const DemoPool pool = detail::make_builtin_pool();
  return pool;
}

}  // namespace dtv
