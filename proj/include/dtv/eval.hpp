#pragma once

// Dataset ingestion, metric computation, and report emission. All rates are
// accumulated as exact integer counts or rationals and rendered to one
// decimal at the very end, so partitioned runs merge exactly and reports are
// byte-stable across platforms.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dtv/answers.hpp"
#include "dtv/core.hpp"
#include "dtv/pipeline.hpp"
#include "dtv/rational.hpp"
#include "dtv/rng.hpp"

namespace dtv {

// ---------------------------------------------------------------------------
// Dataset files: JSON Lines of (id, statement, ground_truth, dataset)

inline Result<std::vector<Problem>> load_problems(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Error{ErrCode::BadInput, "cannot open dataset file " + path};
  std::vector<Problem> out;
  std::vector<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      Problem p = Json::parse(line).get<Problem>();
      if (p.id.empty())
        return Error{ErrCode::BadInput, path + ":" + std::to_string(lineno) + ": empty id"};
      if (std::find(ids.begin(), ids.end(), p.id) != ids.end())
        return Error{ErrCode::BadInput,
                     path + ":" + std::to_string(lineno) + ": duplicate id " + p.id};
      ids.push_back(p.id);
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      return Error{ErrCode::BadInput,
                   path + ":" + std::to_string(lineno) + ": " + e.what()};
    }
  }
  return out;
}

inline Result<bool> save_problems(const std::string& path, const std::vector<Problem>& problems) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) return Error{ErrCode::BadInput, "cannot write dataset file " + path};
  for (const auto& p : problems) out << Json(p).dump() << "\n";
  return true;
}

// ---------------------------------------------------------------------------
// Selectors

enum class Selector { SingleSample, Majority, Dtv };

inline const char* selector_name(Selector s) {
  switch (s) {
    case Selector::SingleSample: return "single-sample";
    case Selector::Majority: return "majority";
    case Selector::Dtv: return "dtv";
  }
  return "?";
}

// Applies a selector to a record set. Single-sample and majority reuse the
// voting code path with verified flags cleared; single-sample sees only the
// first record.
inline Result<Selection> select_with(const std::vector<SampleRecord>& records, Selector selector) {
  if (selector == Selector::Dtv) return select_answer(records);
  std::vector<SampleRecord> view = records;
  if (selector == Selector::SingleSample && view.size() > 1) view.resize(1);
  for (auto& r : view) r.verified = false;
  return select_answer(view);
}

// ---------------------------------------------------------------------------
// Metrics

struct EvalInput {
  Problem problem;
  std::vector<SampleRecord> records;
  std::optional<Selection> selection;  // the pipeline's own (dtv) selection
};

inline EvalInput eval_input(const Problem& problem, const ProblemRun& run) {
  return EvalInput{problem, run.records, run.selection};
}

inline Result<Answer> ground_truth_answer(const Problem& p) {
  if (p.ground_truth.empty())
    return Error{ErrCode::BadInput, "problem " + p.id + " has no ground truth"};
  return canonicalize_ground_truth(p.ground_truth);
}

inline Result<Rational> solve_rate(const std::vector<std::optional<Selection>>& selections,
                                   const std::vector<Problem>& problems) {
  if (selections.size() != problems.size())
    return Error{ErrCode::BadInput, "selections and problems are not aligned"};
  if (problems.empty()) return Error{ErrCode::BadInput, "empty problem set"};
  long long correct = 0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    auto truth = ground_truth_answer(problems[i]);
    if (!truth.ok()) return truth.error();
    if (selections[i] && answers_equal(selections[i]->answer, truth.value())) ++correct;
  }
  return Rational(correct, static_cast<long long>(problems.size()));
}

struct CorrectAnswerRates {
  Rational before;                  // correct fraction among all answered samples
  std::optional<Rational> after;    // among verified samples; absent when none
};

inline Result<CorrectAnswerRates> correct_answer_rate(const std::vector<EvalInput>& inputs) {
  long long answered = 0, answered_correct = 0, verified = 0, verified_correct = 0;
  for (const auto& in : inputs) {
    auto truth = ground_truth_answer(in.problem);
    if (!truth.ok()) return truth.error();
    for (const auto& r : in.records) {
      if (!r.answer) continue;
      ++answered;
      bool correct = answers_equal(*r.answer, truth.value());
      if (correct) ++answered_correct;
      if (r.verified) {
        ++verified;
        if (correct) ++verified_correct;
      }
    }
  }
  if (answered == 0) return Error{ErrCode::BadInput, "no answered samples"};
  CorrectAnswerRates rates;
  rates.before = Rational(answered_correct, answered);
  if (verified > 0) rates.after = Rational(verified_correct, verified);
  return rates;
}

// Exact counts, so reports over partitioned record sets merge losslessly.
struct RateCell {
  long long correct = 0;
  long long total = 0;

  Rational ratio() const { return total == 0 ? Rational(0) : Rational(correct, total); }
};

// Mean solve rate for each n in 1..max_n over `rounds` random n-subsets of
// every problem's samples.
inline Result<std::vector<RateCell>> samples_curve(const std::vector<EvalInput>& inputs,
                                                   Selector selector, int max_n, int rounds,
                                                   Rng& rng) {
  if (max_n < 1 || rounds < 1)
    return Error{ErrCode::BadInput, "curve needs max_n >= 1 and rounds >= 1"};
  for (const auto& in : inputs)
    if (static_cast<int>(in.records.size()) < max_n)
      return Error{ErrCode::BadInput, "problem " + in.problem.id + " has only " +
                                          std::to_string(in.records.size()) +
                                          " samples, curve needs " + std::to_string(max_n)};
  std::vector<Answer> truths;
  truths.reserve(inputs.size());
  for (const auto& in : inputs) {
    auto truth = ground_truth_answer(in.problem);
    if (!truth.ok()) return truth.error();
    truths.push_back(std::move(truth).take());
  }

  std::vector<RateCell> curve(static_cast<std::size_t>(max_n));
  std::vector<SampleRecord> subset;
  for (int n = 1; n <= max_n; ++n) {
    RateCell& cell = curve[static_cast<std::size_t>(n - 1)];
    for (int round = 0; round < rounds; ++round) {
      for (std::size_t p = 0; p < inputs.size(); ++p) {
        const auto& records = inputs[p].records;
        auto picks = rng.sample_indices(records.size(), static_cast<std::size_t>(n));
        subset.clear();
        for (std::size_t i : picks) subset.push_back(records[i]);
        auto sel = selector == Selector::Dtv ? select_answer(subset)
                                             : select_with(subset, Selector::Majority);
        ++cell.total;
        if (sel.ok() && answers_equal(sel.value().answer, truths[p])) ++cell.correct;
      }
    }
  }
  return curve;
}

// Spearman rank correlation between position (1..k) and the values, using
// average ranks for ties. Degenerate inputs (constant values, fewer than two
// points) return 0.
inline double spearman_vs_index(const std::vector<Rational>& values) {
  std::size_t k = values.size();
  if (k < 2) return 0.0;
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<double> rank(k, 0.0);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  double mean = 0.5 * static_cast<double>(k + 1);
  double cov = 0.0, var_idx = 0.0, var_val = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    double di = static_cast<double>(t + 1) - mean;
    double dv = rank[t] - mean;
    cov += di * dv;
    var_idx += di * di;
    var_val += dv * dv;
  }
  if (var_val == 0.0) return 0.0;
  return cov / std::sqrt(var_idx * var_val);
}

inline std::vector<Rational> curve_ratios(const std::vector<RateCell>& curve) {
  std::vector<Rational> out;
  out.reserve(curve.size());
  for (const auto& cell : curve) out.push_back(cell.ratio());
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct EvalReport {
  std::uint64_t seed = 0;
  std::string config_hex;
  std::string backend;
  std::string cassette_hex;  // empty when no cassette was involved
  int samples_per_problem = 0;
  std::vector<std::string> datasets;  // column order: first appearance
  std::array<std::vector<RateCell>, 3> solve;  // [selector][dataset index]
  long long problems = 0;
  RateCell answered;   // correct answers among all answered samples
  RateCell verified;   // correct answers among verified samples; total 0 = absent
  std::vector<RateCell> curve_majority;  // index i = n of i+1
  std::vector<RateCell> curve_dtv;
};

namespace detail {

// One decimal place, exact rational rounding, halves away from zero.
inline std::string percent_1dp(const Rational& r) {
  Rational scaled = r * 1000;
  BigInt q = numerator(scaled) / denominator(scaled);
  Rational rem = scaled - Rational(q);
  if (rem * 2 >= 1) q += 1;
  BigInt whole = q / 10;
  BigInt tenth = q % 10;
  std::ostringstream out;
  out << whole << "." << tenth;
  return out.str();
}

inline std::size_t dataset_column(EvalReport& report, const std::string& name) {
  for (std::size_t i = 0; i < report.datasets.size(); ++i)
    if (report.datasets[i] == name) return i;
  report.datasets.push_back(name);
  for (auto& row : report.solve) row.push_back(RateCell{});
  return report.datasets.size() - 1;
}

}  // namespace detail

struct CurveSpec {
  int max_n = 0;   // 0 = samples available on every problem, capped at config
  int rounds = 4;
};

inline Result<EvalReport> build_report(const std::vector<Problem>& problems,
                                       const std::vector<ProblemRun>& runs,
                                       const PipelineConfig& config, const std::string& backend,
                                       CurveSpec curve = {}, const std::string& cassette_hex = "") {
  if (problems.size() != runs.size())
    return Error{ErrCode::BadInput, "problems and runs are not aligned"};
  EvalReport report;
  report.seed = config.seed;
  report.config_hex = config_digest(config);
  report.backend = backend;
  report.cassette_hex = cassette_hex;
  report.samples_per_problem = config.samples_per_problem;
  report.problems = static_cast<long long>(problems.size());

  std::vector<EvalInput> inputs;
  inputs.reserve(problems.size());
  for (std::size_t i = 0; i < problems.size(); ++i)
    inputs.push_back(eval_input(problems[i], runs[i]));

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto truth = ground_truth_answer(inputs[i].problem);
    if (!truth.ok()) return truth.error();
    std::size_t col = detail::dataset_column(report, dataset_name(inputs[i].problem.dataset));
    for (Selector sel : {Selector::SingleSample, Selector::Majority, Selector::Dtv}) {
      RateCell& cell = report.solve[static_cast<std::size_t>(sel)][col];
      ++cell.total;
      Result<Selection> chosen = sel == Selector::Dtv && inputs[i].selection
                                     ? Result<Selection>(*inputs[i].selection)
                                     : select_with(inputs[i].records, sel);
      if (chosen.ok() && answers_equal(chosen.value().answer, truth.value())) ++cell.correct;
    }
  }

  auto rates = correct_answer_rate(inputs);
  if (rates.ok()) {
    // Re-derive the exact counts for mergeability.
    long long answered = 0, answered_correct = 0, verified = 0, verified_correct = 0;
    for (const auto& in : inputs) {
      Answer truth = ground_truth_answer(in.problem).value();
      for (const auto& r : in.records) {
        if (!r.answer) continue;
        ++answered;
        bool correct = answers_equal(*r.answer, truth);
        if (correct) ++answered_correct;
        if (r.verified) {
          ++verified;
          if (correct) ++verified_correct;
        }
      }
    }
    report.answered = {answered_correct, answered};
    report.verified = {verified_correct, verified};
  } else if (rates.error().code != ErrCode::BadInput) {
    return rates.error();
  }

  if (curve.rounds > 0) {
    int max_n = curve.max_n;
    if (max_n == 0) {
      max_n = config.samples_per_problem;
      for (const auto& in : inputs)
        max_n = std::min<int>(max_n, static_cast<int>(in.records.size()));
    }
    if (max_n >= 1 && !inputs.empty()) {
      Rng rng_major = derive_rng(config.seed, "curve:majority");
      auto major = samples_curve(inputs, Selector::Majority, max_n, curve.rounds, rng_major);
      if (!major.ok()) return major.error();
      report.curve_majority = std::move(major).take();
      Rng rng_dtv = derive_rng(config.seed, "curve:dtv");
      auto dtv = samples_curve(inputs, Selector::Dtv, max_n, curve.rounds, rng_dtv);
      if (!dtv.ok()) return dtv.error();
      report.curve_dtv = std::move(dtv).take();
    }
  }
  return report;
}

// Cellwise sum; curves must agree in length (or be absent on one side).
inline Result<EvalReport> merge_reports(const EvalReport& a, const EvalReport& b) {
  EvalReport out = a;
  out.problems += b.problems;
  for (std::size_t i = 0; i < b.datasets.size(); ++i) {
    std::size_t col = detail::dataset_column(out, b.datasets[i]);
    for (std::size_t s = 0; s < 3; ++s) {
      out.solve[s][col].correct += b.solve[s][i].correct;
      out.solve[s][col].total += b.solve[s][i].total;
    }
  }
  out.answered.correct += b.answered.correct;
  out.answered.total += b.answered.total;
  out.verified.correct += b.verified.correct;
  out.verified.total += b.verified.total;
  auto merge_curve = [](std::vector<RateCell>& into, const std::vector<RateCell>& from)
      -> std::optional<Error> {
    if (from.empty()) return std::nullopt;
    if (into.empty()) {
      into = from;
      return std::nullopt;
    }
    if (into.size() != from.size())
      return Error{ErrCode::BadInput, "cannot merge curves of different lengths"};
    for (std::size_t i = 0; i < into.size(); ++i) {
      into[i].correct += from[i].correct;
      into[i].total += from[i].total;
    }
    return std::nullopt;
  };
  if (auto err = merge_curve(out.curve_majority, b.curve_majority)) return *err;
  if (auto err = merge_curve(out.curve_dtv, b.curve_dtv)) return *err;
  return out;
}

inline std::string emit_report_markdown(const EvalReport& report) {
  std::ostringstream out;
  out << "# Run report\n\n";
  out << "- seed: " << report.seed << "\n";
  out << "- config: " << report.config_hex << "\n";
  out << "- backend: " << report.backend << "\n";
  out << "- cassette: " << (report.cassette_hex.empty() ? "-" : report.cassette_hex) << "\n";
  out << "- problems: " << report.problems << "\n";
  out << "- samples per problem: " << report.samples_per_problem << "\n\n";

  out << "## Solve rate (%)\n\n";
  out << "| Selector |";
  for (const auto& ds : report.datasets) out << " " << ds << " |";
  out << " Average |\n";
  out << "| --- |";
  for (std::size_t i = 0; i < report.datasets.size() + 1; ++i) out << " --- |";
  out << "\n";
  for (Selector sel : {Selector::SingleSample, Selector::Majority, Selector::Dtv}) {
    const auto& row = report.solve[static_cast<std::size_t>(sel)];
    out << "| " << selector_name(sel) << " |";
    Rational sum(0);
    for (const auto& cell : row) {
      out << " " << detail::percent_1dp(cell.ratio()) << " |";
      sum += cell.ratio();
    }
    Rational avg = row.empty() ? Rational(0) : sum / static_cast<long long>(row.size());
    out << " " << detail::percent_1dp(avg) << " |\n";
  }
  out << "\nAverage is the unweighted mean over dataset columns.\n\n";

  out << "## Correct answers among samples (%)\n\n";
  out << "| Pool | Rate |\n| --- | --- |\n";
  out << "| all answered samples | "
      << (report.answered.total ? detail::percent_1dp(report.answered.ratio()) : "-") << " |\n";
  out << "| verified samples | "
      << (report.verified.total ? detail::percent_1dp(report.verified.ratio()) : "-") << " |\n";

  if (!report.curve_majority.empty()) {
    out << "\n## Solve rate by samples used (%)\n\n";
    out << "| n | majority | dtv |\n| --- | --- | --- |\n";
    for (std::size_t i = 0; i < report.curve_majority.size(); ++i) {
      out << "| " << (i + 1) << " | " << detail::percent_1dp(report.curve_majority[i].ratio())
          << " | "
          << (i < report.curve_dtv.size() ? detail::percent_1dp(report.curve_dtv[i].ratio()) : "-")
          << " |\n";
    }
  }
  return out.str();
}

inline std::string emit_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "section,key,dataset,correct,total,percent\n";
  auto cell_row = [&](const std::string& section, const std::string& key,
                      const std::string& dataset, const RateCell& cell) {
    out << section << "," << key << "," << dataset << "," << cell.correct << "," << cell.total
        << "," << (cell.total ? detail::percent_1dp(cell.ratio()) : "-") << "\n";
  };
  out << "meta,seed," << report.seed << ",,,\n";
  out << "meta,config," << report.config_hex << ",,,\n";
  out << "meta,backend," << report.backend << ",,,\n";
  out << "meta,cassette," << report.cassette_hex << ",,,\n";
  out << "meta,problems," << report.problems << ",,,\n";
  out << "meta,samples," << report.samples_per_problem << ",,,\n";
  for (Selector sel : {Selector::SingleSample, Selector::Majority, Selector::Dtv})
    for (std::size_t i = 0; i < report.datasets.size(); ++i)
      cell_row("solve", selector_name(sel), report.datasets[i],
               report.solve[static_cast<std::size_t>(sel)][i]);
  cell_row("answers", "before", "", report.answered);
  cell_row("answers", "after", "", report.verified);
  for (std::size_t i = 0; i < report.curve_majority.size(); ++i)
    cell_row("curve", "majority", "n=" + std::to_string(i + 1), report.curve_majority[i]);
  for (std::size_t i = 0; i < report.curve_dtv.size(); ++i)
    cell_row("curve", "dtv", "n=" + std::to_string(i + 1), report.curve_dtv[i]);
  return out.str();
}

// Raw CSV rows; none of the emitted values contain commas.
inline Result<std::vector<std::vector<std::string>>> load_report_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) return Error{ErrCode::BadInput, "empty csv"};
  return rows;
}

// Rebuilds a report from its CSV emission. emit_report_csv(report_from_csv(x))
// reproduces x byte-exactly.
inline Result<EvalReport> report_from_csv(const std::string& text) {
  auto rows = load_report_csv(text);
  if (!rows.ok()) return rows.error();
  EvalReport report;
  auto selector_index = [](const std::string& name) -> int {
    for (int s = 0; s < 3; ++s)
      if (name == selector_name(static_cast<Selector>(s))) return s;
    return -1;
  };
  try {
  for (std::size_t i = 1; i < rows.value().size(); ++i) {
    const auto& row = rows.value()[i];
    if (row.size() != 6) return Error{ErrCode::BadInput, "csv row has wrong arity"};
    const std::string& section = row[0];
    const std::string& key = row[1];
    if (section == "meta") {
      if (key == "seed") report.seed = std::stoull(row[2]);
      else if (key == "config") report.config_hex = row[2];
      else if (key == "backend") report.backend = row[2];
      else if (key == "cassette") report.cassette_hex = row[2];
      else if (key == "problems") report.problems = std::stoll(row[2]);
      else if (key == "samples") report.samples_per_problem = std::stoi(row[2]);
      else return Error{ErrCode::BadInput, "unknown meta row " + key};
      continue;
    }
    RateCell cell{std::stoll(row[3]), std::stoll(row[4])};
    if (section == "solve") {
      int s = selector_index(key);
      if (s < 0) return Error{ErrCode::BadInput, "unknown selector " + key};
      std::size_t col = detail::dataset_column(report, row[2]);
      report.solve[static_cast<std::size_t>(s)][col] = cell;
    } else if (section == "answers") {
      if (key == "before") report.answered = cell;
      else if (key == "after") report.verified = cell;
      else return Error{ErrCode::BadInput, "unknown answers row " + key};
    } else if (section == "curve") {
      if (row[2].rfind("n=", 0) != 0)
        return Error{ErrCode::BadInput, "curve row without n= index"};
      std::size_t n = std::stoul(row[2].substr(2));
      auto& curve = key == "majority" ? report.curve_majority : report.curve_dtv;
      if (key != "majority" && key != "dtv")
        return Error{ErrCode::BadInput, "unknown curve selector " + key};
      if (curve.size() < n) curve.resize(n);
      curve[n - 1] = cell;
    } else {
      return Error{ErrCode::BadInput, "unknown csv section " + section};
    }
  }
  } catch (const std::exception& e) {
    return Error{ErrCode::BadInput, std::string("malformed csv value: ") + e.what()};
  }
  return report;
}

// ---------------------------------------------------------------------------
// Run directory

inline std::string run_dir_name(const PipelineConfig& config) {
  return "run-s" + std::to_string(config.seed) + "-" + config_digest(config).substr(0, 12);
}

inline Result<std::string> write_run_dir(const std::string& base_dir,
                                         const PipelineConfig& config, const EvalReport& report,
                                         const std::vector<ProblemRun>& runs) {
  namespace fs = std::filesystem;
  fs::path dir = fs::path(base_dir) / run_dir_name(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    return Error{ErrCode::BadInput, "cannot create run dir " + dir.string() + ": " + ec.message()};

  {
    std::ofstream md(dir / "report.md", std::ios::trunc | std::ios::binary);
    if (!md) return Error{ErrCode::BadInput, "cannot write report.md"};
    md << emit_report_markdown(report);
  }
  {
    std::ofstream csv(dir / "report.csv", std::ios::trunc | std::ios::binary);
    if (!csv) return Error{ErrCode::BadInput, "cannot write report.csv"};
    csv << emit_report_csv(report);
  }
  {
    std::ofstream trace(dir / "trace.jsonl", std::ios::trunc | std::ios::binary);
    if (!trace) return Error{ErrCode::BadInput, "cannot write trace.jsonl"};
    for (const auto& run : runs)
      for (const auto& row : run.trace) trace << Json(row).dump() << "\n";
  }
  return dir.string();
}

}  // namespace dtv
