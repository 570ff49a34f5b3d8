#pragma once

// End-to-end answer selection: sample informal solutions, extract answers,
// formalize each solution's claim into the restricted language, filter
// statements that could verify for the wrong reason, verify the rest with
// the built-in prover, then majority-vote over verified samples with a
// fallback to plain majority when nothing verifies.

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dtv/answers.hpp"
#include "dtv/core.hpp"
#include "dtv/llm.hpp"
#include "dtv/parser.hpp"
#include "dtv/printer.hpp"
#include "dtv/prompts.hpp"
#include "dtv/prover.hpp"
#include "dtv/rng.hpp"

namespace dtv {

enum class VerifyStatus {
  Verified,
  StepFailed,
  GoalUnreached,
  Vacuous,
  Unfaithful,
  FormalizationError,
  BudgetExhausted,
};

inline const char* verify_status_name(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::Verified: return "verified";
    case VerifyStatus::StepFailed: return "step-failed";
    case VerifyStatus::GoalUnreached: return "goal-unreached";
    case VerifyStatus::Vacuous: return "vacuous";
    case VerifyStatus::Unfaithful: return "unfaithful";
    case VerifyStatus::FormalizationError: return "formalization-error";
    case VerifyStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

struct VerificationResult {
  VerifyStatus status = VerifyStatus::FormalizationError;
  int failed_step = 0;  // 1-based; meaningful for StepFailed only
  std::string detail;
  // provenance
  std::string statement_text;
  std::string sketch_text;
  int attempt_index = 0;
};

inline void to_json(Json& j, const VerificationResult& r) {
  j = Json{{"status", verify_status_name(r.status)},
           {"failed_step", r.failed_step},
           {"detail", r.detail},
           {"statement", r.statement_text},
           {"sketch", r.sketch_text},
           {"attempt", r.attempt_index}};
}

struct SampleRecord {
  InformalSolution solution;
  std::optional<Answer> answer;
  std::vector<VerificationResult> attempts;
  bool verified = false;
};

struct StatementAttempt {
  int index = 0;
  std::string raw;
  std::optional<FormalStatement> statement;
  std::string parse_error;
  bool duplicate = false;
};

// One trace row per pipeline event; the rows audit every prompt digest and
// stage outcome of a run.
struct TraceRow {
  std::string problem_id;
  int sample_index = -1;
  int attempt = -1;
  std::string stage;
  std::string outcome;
  std::string digest;
};

inline void to_json(Json& j, const TraceRow& t) {
  j = Json{{"problem_id", t.problem_id}, {"sample_index", t.sample_index},
           {"attempt", t.attempt},       {"stage", t.stage},
           {"outcome", t.outcome},       {"digest", t.digest}};
}

// ---------------------------------------------------------------------------
// Statement formalization

inline GenRequest formalization_request(std::string prompt) {
  GenRequest req;
  req.prompt = std::move(prompt);
  req.n = 1;
  req.temperature = 0.0;  // variation comes from redrawn demos, not sampling
  req.nucleus_p = 1.0;
  return req;
}

// Runs the configured number of statement attempts for one solution. Parse
// failures are attempts too; re-printed duplicates of an earlier parse are
// flagged and skipped downstream.
inline Result<std::vector<StatementAttempt>> formalize_statement(
    const Problem& problem, const Answer& answer, LlmBackend& llm, const DemoPool& pool,
    const PipelineConfig& config, int sample_index, std::vector<TraceRow>* trace) {
  std::vector<StatementAttempt> out;
  std::vector<std::string> seen;  // printed forms of earlier parses
  for (int a = 0; a < config.statement_attempts_per_solution; ++a) {
    Rng rng = derive_rng(config.seed, "statement:" + problem.id + ":" +
                                          std::to_string(sample_index) + ":" + std::to_string(a));
    auto prompt = build_statement_prompt(problem, answer, pool, rng, config);
    if (!prompt.ok()) return prompt.error();
    GenRequest req = formalization_request(std::move(prompt).take());
    std::string digest = gen_digest(req);
    auto gen = generate(llm, req);
    if (!gen.ok()) return gen.error();
    StatementAttempt attempt;
    attempt.index = a;
    attempt.raw = gen.value().empty() ? std::string() : gen.value()[0];
    auto parsed = parse_statement(attempt.raw);
    std::string outcome;
    if (!parsed.ok()) {
      attempt.parse_error = parsed.error().render();
      outcome = "parse-failed";
    } else {
      std::string printed = print_statement(parsed.value());
      if (std::find(seen.begin(), seen.end(), printed) != seen.end()) {
        attempt.duplicate = true;
        outcome = "duplicate";
      } else {
        seen.push_back(printed);
        outcome = "parsed";
      }
      attempt.statement = std::move(parsed).take();
    }
    if (trace)
      trace->push_back({problem.id, sample_index, a, "statement", outcome, digest});
    out.push_back(std::move(attempt));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Filters

struct FilterDecision {
  bool keep = true;
  VerifyStatus reason = VerifyStatus::Verified;  // Vacuous or Unfaithful when discarded
  std::string detail;
};

// Vacuous check first (symbolic, no model call), then self-critique scoring.
// A tie between the yes and no scores keeps the statement.
inline Result<FilterDecision> apply_filters(const FormalStatement& stmt, const Problem& problem,
                                            const Answer& answer, LlmBackend& llm,
                                            ProverBackend& prover, const DemoPool& pool,
                                            const PipelineConfig& config,
                                            std::vector<TraceRow>* trace, int sample_index,
                                            int attempt) {
  if (config.vacuous_filter) {
    ProofTask task = task_from_statement(stmt, config.prover_budget);
    task.goal = Formula::falsity();
    auto outcome = prover.prove_task(task);
    if (outcome.status == ProveStatus::Proved) {
      if (trace)
        trace->push_back({problem.id, sample_index, attempt, "filter", "vacuous", ""});
      return FilterDecision{false, VerifyStatus::Vacuous, "assumptions prove False"};
    }
  }
  if (config.self_critique) {
    std::string informal = augmented_statement(problem.statement_text, canonical_text(answer));
    ScoreRequest req;
    req.prompt = build_critique_prompt(informal, print_statement(stmt), pool);
    req.continuations = {kYesPrefix, kNoPrefix};
    std::string digest = score_digest(req);
    auto scores = score(llm, req);
    if (!scores.ok()) return scores.error();
    double yes = scores.value()[0];
    double no = scores.value()[1];
    if (no > yes) {
      if (trace)
        trace->push_back({problem.id, sample_index, attempt, "filter", "unfaithful", digest});
      return FilterDecision{false, VerifyStatus::Unfaithful, "critique scored No above Yes"};
    }
    if (trace)
      trace->push_back({problem.id, sample_index, attempt, "filter", "kept", digest});
  } else if (trace) {
    trace->push_back({problem.id, sample_index, attempt, "filter", "kept", ""});
  }
  return FilterDecision{};
}

// ---------------------------------------------------------------------------
// Verification

// Proves sketch steps in order against the growing proved-set, then the
// statement's goal. An empty sketch verifies the goal directly from the
// assumptions (statement-only mode).
inline VerificationResult verify_solution(const FormalStatement& stmt,
                                          const SolutionSketch& sketch, ProverBackend& prover,
                                          std::int64_t budget) {
  VerificationResult result;
  result.statement_text = print_statement(stmt);
  result.sketch_text = sketch.steps.empty() ? std::string() : print_sketch(sketch);

  ProofTask task;
  task.var_types = stmt.var_types();
  task.budget = budget;
  for (const auto& a : stmt.assumes) task.hypotheses.push_back(a.formula);

  for (std::size_t i = 0; i < sketch.steps.size(); ++i) {
    task.goal = sketch.steps[i].goal;
    auto outcome = prover.prove_task(task);
    if (outcome.status == ProveStatus::BudgetExhausted) {
      result.status = VerifyStatus::BudgetExhausted;
      result.detail = "step " + std::to_string(i + 1) + ": " + outcome.detail;
      return result;
    }
    if (outcome.status != ProveStatus::Proved) {
      result.status = VerifyStatus::StepFailed;
      result.failed_step = static_cast<int>(i + 1);
      result.detail = outcome.detail;
      return result;
    }
    task.hypotheses.push_back(sketch.steps[i].goal);
  }

  task.goal = stmt.shows;
  auto outcome = prover.prove_task(task);
  if (outcome.status == ProveStatus::BudgetExhausted) {
    result.status = VerifyStatus::BudgetExhausted;
    result.detail = "goal: " + outcome.detail;
    return result;
  }
  if (outcome.status != ProveStatus::Proved) {
    result.status = VerifyStatus::GoalUnreached;
    result.detail = outcome.detail;
    return result;
  }
  result.status = VerifyStatus::Verified;
  result.detail = outcome.detail;
  return result;
}

// ---------------------------------------------------------------------------
// Selection

struct AnswerCount {
  Answer answer;
  int count = 0;
};

struct Selection {
  Answer answer;
  enum class Mode { VerifiedMajority, FallbackMajority } mode = Mode::FallbackMajority;
  std::vector<AnswerCount> tally;  // winning pool, sorted by canonical order
};

inline const char* selection_mode_name(Selection::Mode m) {
  return m == Selection::Mode::VerifiedMajority ? "verified-majority" : "fallback-majority";
}

namespace detail {

inline std::vector<AnswerCount> tally_answers(const std::vector<SampleRecord>& records,
                                              bool verified_only) {
  std::vector<AnswerCount> tally;
  for (const auto& r : records) {
    if (!r.answer) continue;
    if (verified_only && !r.verified) continue;
    auto it = std::find_if(tally.begin(), tally.end(),
                           [&](const AnswerCount& c) { return answers_equal(c.answer, *r.answer); });
    if (it == tally.end())
      tally.push_back({*r.answer, 1});
    else
      ++it->count;
  }
  std::sort(tally.begin(), tally.end(),
            [](const AnswerCount& a, const AnswerCount& b) { return answer_less(a.answer, b.answer); });
  return tally;
}

inline const AnswerCount* argmax_tally(const std::vector<AnswerCount>& tally) {
  const AnswerCount* best = nullptr;
  for (const auto& c : tally)
    if (!best || c.count > best->count) best = &c;  // ties keep the canonically smaller entry
  return best;
}

}  // namespace detail

// Majority over verified samples; plain majority when nothing verified. Ties
// go to the smallest canonical answer, so record order never matters.
inline Result<Selection> select_answer(const std::vector<SampleRecord>& records) {
  Selection sel;
  sel.tally = detail::tally_answers(records, true);
  sel.mode = Selection::Mode::VerifiedMajority;
  if (sel.tally.empty()) {
    sel.tally = detail::tally_answers(records, false);
    sel.mode = Selection::Mode::FallbackMajority;
  }
  const AnswerCount* best = detail::argmax_tally(sel.tally);
  if (!best) return Error{ErrCode::NoAnswers, "no extractable answers among samples"};
  sel.answer = best->answer;
  return sel;
}

// ---------------------------------------------------------------------------
// Problem runner

struct ProblemRun {
  std::string problem_id;
  std::vector<SampleRecord> records;
  std::optional<Selection> selection;
  std::vector<TraceRow> trace;
};

inline Result<ProblemRun> run_problem(const Problem& problem, const PipelineConfig& config,
                                      LlmBackend& llm, ProverBackend& prover,
                                      const DemoPool& pool) {
  ProblemRun run;
  run.problem_id = problem.id;

  GenRequest sample_req;
  sample_req.prompt = build_sampling_prompt(problem, pool);
  sample_req.n = config.samples_per_problem;
  sample_req.temperature = config.sampling.temperature;
  sample_req.nucleus_p = config.sampling.nucleus_p;
  sample_req.max_tokens = config.sampling.max_tokens;
  std::string sample_digest = gen_digest(sample_req);
  auto sampled = generate(llm, sample_req);
  if (!sampled.ok()) return sampled.error();
  run.trace.push_back({problem.id, -1, -1, "sample",
                       std::to_string(sampled.value().size()) + " solutions", sample_digest});

  for (int s = 0; s < static_cast<int>(sampled.value().size()); ++s) {
    SampleRecord record;
    record.solution.problem_id = problem.id;
    record.solution.sample_index = s;
    record.solution.text = sampled.value()[static_cast<std::size_t>(s)];
    record.solution.sampling = config.sampling;

    auto answer = extract_answer(record.solution.text);
    if (!answer.ok()) {
      run.trace.push_back({problem.id, s, -1, "extract", "no-answer", ""});
      run.records.push_back(std::move(record));
      continue;
    }
    record.answer = std::move(answer).take();
    run.trace.push_back({problem.id, s, -1, "extract", canonical_text(*record.answer), ""});

    auto attempts =
        formalize_statement(problem, *record.answer, llm, pool, config, s, &run.trace);
    if (!attempts.ok()) return attempts.error();

    for (auto& attempt : attempts.value()) {
      if (record.verified) break;  // later attempts cannot change the outcome
      if (attempt.duplicate) continue;
      if (!attempt.statement) {
        VerificationResult vr;
        vr.status = VerifyStatus::FormalizationError;
        vr.detail = attempt.parse_error;
        vr.statement_text = attempt.raw;
        vr.attempt_index = attempt.index;
        run.trace.push_back({problem.id, s, attempt.index, "verify",
                             verify_status_name(vr.status), ""});
        record.attempts.push_back(std::move(vr));
        continue;
      }
      const FormalStatement& stmt = *attempt.statement;

      auto decision = apply_filters(stmt, problem, *record.answer, llm, prover, pool, config,
                                    &run.trace, s, attempt.index);
      if (!decision.ok()) return decision.error();
      if (!decision.value().keep) {
        VerificationResult vr;
        vr.status = decision.value().reason;
        vr.detail = decision.value().detail;
        vr.statement_text = print_statement(stmt);
        vr.attempt_index = attempt.index;
        run.trace.push_back({problem.id, s, attempt.index, "verify",
                             verify_status_name(vr.status), ""});
        record.attempts.push_back(std::move(vr));
        continue;
      }

      SolutionSketch sketch;
      if (config.use_sketches) {
        Rng rng = derive_rng(config.seed, "sketch:" + problem.id + ":" + std::to_string(s) + ":" +
                                              std::to_string(attempt.index));
        auto prompt = build_solution_prompt(problem, *record.answer, print_statement(stmt),
                                            record.solution.text, pool, rng, config);
        if (!prompt.ok()) return prompt.error();
        GenRequest req = formalization_request(std::move(prompt).take());
        std::string digest = gen_digest(req);
        auto gen = generate(llm, req);
        if (!gen.ok()) return gen.error();
        std::string raw = gen.value().empty() ? std::string() : gen.value()[0];
        auto parsed = parse_sketch(raw, stmt);
        if (!parsed.ok()) {
          run.trace.push_back({problem.id, s, attempt.index, "sketch", "parse-failed", digest});
          VerificationResult vr;
          vr.status = VerifyStatus::FormalizationError;
          vr.detail = "sketch: " + parsed.error().render();
          vr.statement_text = print_statement(stmt);
          vr.sketch_text = raw;
          vr.attempt_index = attempt.index;
          record.attempts.push_back(std::move(vr));
          continue;
        }
        sketch = std::move(parsed).take();
        run.trace.push_back({problem.id, s, attempt.index, "sketch",
                             std::to_string(sketch.steps.size()) + " steps", digest});
      }

      VerificationResult vr = verify_solution(stmt, sketch, prover, config.prover_budget);
      vr.attempt_index = attempt.index;
      run.trace.push_back({problem.id, s, attempt.index, "verify",
                           verify_status_name(vr.status), ""});
      if (vr.status == VerifyStatus::Verified) record.verified = true;
      record.attempts.push_back(std::move(vr));
    }
    run.records.push_back(std::move(record));
  }

  auto selection = select_answer(run.records);
  if (selection.ok()) {
    run.selection = std::move(selection).take();
    run.trace.push_back({problem.id, -1, -1, "select",
                         std::string(selection_mode_name(run.selection->mode)) + " " +
                             canonical_text(run.selection->answer),
                         ""});
  } else if (selection.error().code == ErrCode::NoAnswers) {
    run.trace.push_back({problem.id, -1, -1, "select", "no-answers", ""});
  } else {
    return selection.error();
  }
  return run;
}

// Runs problems with a bounded worker pool. Results and trace rows are merged
// in input order, so worker count never changes output bytes.
inline Result<std::vector<ProblemRun>> run_many(const std::vector<Problem>& problems,
                                                const PipelineConfig& config, LlmBackend& llm,
                                                ProverBackend& prover, const DemoPool& pool,
                                                int workers = 1) {
  std::vector<Result<ProblemRun>> results;
  results.reserve(problems.size());
  for (std::size_t i = 0; i < problems.size(); ++i)
    results.push_back(Error{ErrCode::BadInput, "not run"});

  if (workers <= 1) {
    for (std::size_t i = 0; i < problems.size(); ++i)
      results[i] = run_problem(problems[i], config, llm, prover, pool);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= problems.size()) break;
        results[i] = run_problem(problems[i], config, llm, prover, pool);
      }
    };
    std::vector<std::thread> threads;
    int n = std::min<int>(workers, static_cast<int>(problems.size()));
    threads.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::vector<ProblemRun> out;
  out.reserve(problems.size());
  for (auto& r : results) {
    if (!r.ok()) return r.error();
    out.push_back(std::move(r).take());
  }
  return out;
}

}  // namespace dtv
