// Command-line entry points: parse and prove statements, run the selection
// pipeline against a backend, rebuild reports from run directories, and
// score a single statement pair with the critique filter.
//
// Exit codes: 0 success, 1 domain errors (parse failures, cassette misses,
// bad inputs), 2 usage errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dtv/dtv.hpp"

namespace {

int fail(const dtv::Error& e) {
  std::cerr << "error: " << e.render() << "\n";
  return 1;
}

dtv::Result<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return dtv::Error{dtv::ErrCode::BadInput, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ConfigFlags {
  std::string config_file;
  long long seed = -1;
  int samples = -1;
  int attempts = -1;
  long long budget = -1;
  bool no_vacuous_filter = false;
  bool no_self_critique = false;
  bool statement_only = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--config", config_file, "config file (key = value lines)");
    cmd.add_option("--seed", seed, "rng seed");
    cmd.add_option("--samples", samples, "solutions sampled per problem");
    cmd.add_option("--attempts", attempts, "statement attempts per solution");
    cmd.add_option("--budget", budget, "prover work budget per call");
    cmd.add_flag("--no-vacuous-filter", no_vacuous_filter, "disable the vacuity check");
    cmd.add_flag("--no-self-critique", no_self_critique, "disable the critique filter");
    cmd.add_flag("--statement-only", statement_only, "verify statements without proof sketches");
  }

  dtv::Result<dtv::PipelineConfig> resolve() const {
    dtv::PipelineConfig config;
    try {
      if (!config_file.empty()) config = dtv::load_config_file(config_file);
      if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
      if (samples >= 0) config.samples_per_problem = samples;
      if (attempts >= 0) config.statement_attempts_per_solution = attempts;
      if (budget >= 0) config.prover_budget = budget;
      if (no_vacuous_filter) config.vacuous_filter = false;
      if (no_self_critique) config.self_critique = false;
      if (statement_only) config.use_sketches = false;
      config.validate();
    } catch (const std::exception& e) {
      return dtv::Error{dtv::ErrCode::InvalidConfig, e.what()};
    }
    return config;
  }
};

int run_parse(const std::string& file) {
  auto text = slurp(file);
  if (!text.ok()) return fail(text.error());
  auto parsed = dtv::parse_statement(text.value());
  if (!parsed.ok()) return fail(parsed.error());
  const auto& stmt = parsed.value();
  std::cout << dtv::print_statement(stmt) << "\n";
  std::cout << "fixes: " << stmt.fixes.size() << ", assumes: " << stmt.assumes.size() << "\n";
  return 0;
}

int run_prove(const std::string& file, long long budget) {
  auto text = slurp(file);
  if (!text.ok()) return fail(text.error());
  auto parsed = dtv::parse_statement(text.value());
  if (!parsed.ok()) return fail(parsed.error());
  if (dtv::check_vacuous(parsed.value(), budget)) {
    std::cout << "Proved (vacuous)\n";
    return 0;
  }
  dtv::ProofTask task = dtv::task_from_statement(parsed.value(), budget);
  dtv::ProveOutcome outcome = dtv::prove(task);
  switch (outcome.status) {
    case dtv::ProveStatus::Proved:
      std::cout << "Proved (" << outcome.detail << ")\n";
      break;
    case dtv::ProveStatus::Unproved:
      std::cout << "Unproved\n";
      break;
    case dtv::ProveStatus::Unsupported:
      std::cout << "Unsupported: " << outcome.detail << "\n";
      break;
    case dtv::ProveStatus::BudgetExhausted:
      std::cout << "Budget exhausted\n";
      break;
  }
  return 0;
}

int run_critique(const std::string& file, const std::string& cassette_path) {
  auto text = slurp(file);
  if (!text.ok()) return fail(text.error());
  std::string informal, formal;
  try {
    dtv::Json j = dtv::Json::parse(text.value());
    informal = j.at("informal").get<std::string>();
    formal = j.at("formal").get<std::string>();
  } catch (const std::exception& e) {
    return fail({dtv::ErrCode::BadInput,
                 std::string("critique input must be JSON with informal/formal: ") + e.what()});
  }

  dtv::SyntheticWorld synthetic({}, 0, 0);
  std::unique_ptr<dtv::Cassette> cassette;
  std::unique_ptr<dtv::CassetteBackend> replayer;
  dtv::LlmBackend* backend = &synthetic;
  if (!cassette_path.empty()) {
    auto loaded = dtv::Cassette::load(cassette_path);
    if (!loaded.ok()) return fail(loaded.error());
    cassette = std::make_unique<dtv::Cassette>(std::move(loaded).take());
    replayer = std::make_unique<dtv::CassetteBackend>(*cassette, dtv::CassetteMode::Replay);
    backend = replayer.get();
  }

  dtv::ScoreRequest req;
  req.prompt = dtv::build_critique_prompt(informal, formal, dtv::builtin_demo_pool());
  req.continuations = {dtv::kYesPrefix, dtv::kNoPrefix};
  auto scores = backend->score(req);
  if (!scores.ok()) return fail(scores.error());
  double yes = scores.value()[0], no = scores.value()[1];
  std::cout << "yes: " << yes << "\nno: " << no << "\n"
            << (no > yes ? "discard (unfaithful)" : "keep") << "\n";
  return 0;
}

int run_eval(const std::string& run_dir) {
  auto csv = slurp((std::filesystem::path(run_dir) / "report.csv").string());
  if (!csv.ok()) return fail(csv.error());
  auto report = dtv::report_from_csv(csv.value());
  if (!report.ok()) return fail(report.error());
  std::cout << dtv::emit_report_markdown(report.value());
  return 0;
}

struct RunArgs {
  std::string dataset;
  std::string mode = "synthetic";
  std::string cassette_path;
  std::string out_dir = "runs";
  std::string synthetic_params_file;
  int workers = 1;
  int curve_rounds = 4;
  ConfigFlags config;
};

int run_run(const RunArgs& args) {
  auto config = args.config.resolve();
  if (!config.ok()) return fail(config.error());

  std::vector<dtv::Problem> problems;
  std::unique_ptr<dtv::SyntheticWorld> world;
  std::unique_ptr<dtv::Cassette> cassette;
  std::unique_ptr<dtv::CassetteBackend> cassette_backend;
  std::unique_ptr<dtv::HttpBackend> http;
  dtv::LlmBackend* backend = nullptr;
  std::string backend_name;
  std::string cassette_hex;

  if (args.mode == "synthetic") {
    bool numeric = !args.dataset.empty() &&
                   args.dataset.find_first_not_of("0123456789") == std::string::npos;
    if (!numeric)
      return fail({dtv::ErrCode::BadInput,
                   "synthetic mode takes a problem count, got '" + args.dataset + "'"});
    dtv::SyntheticParams params;
    if (!args.synthetic_params_file.empty()) {
      auto text = slurp(args.synthetic_params_file);
      if (!text.ok()) return fail(text.error());
      try {
        params = dtv::Json::parse(text.value()).get<dtv::SyntheticParams>();
      } catch (const std::exception& e) {
        return fail({dtv::ErrCode::BadInput, std::string("bad synthetic params: ") + e.what()});
      }
    }
    if (auto err = dtv::validate(params)) return fail(*err);
    world = std::make_unique<dtv::SyntheticWorld>(params, config.value().seed,
                                                  std::stoull(args.dataset));
    problems = world->problems();
    backend = world.get();
    backend_name = world->name();
  } else if (args.mode == "replay" || args.mode == "record") {
    auto loaded = dtv::load_problems(args.dataset);
    if (!loaded.ok()) return fail(loaded.error());
    problems = std::move(loaded).take();
    if (args.cassette_path.empty())
      return fail({dtv::ErrCode::BadInput, args.mode + " mode requires --cassette"});
    if (args.mode == "replay" && !std::filesystem::exists(args.cassette_path))
      return fail({dtv::ErrCode::CassetteMiss, "no cassette at " + args.cassette_path});
    auto loaded_cassette = dtv::Cassette::load(args.cassette_path);
    if (!loaded_cassette.ok()) return fail(loaded_cassette.error());
    cassette = std::make_unique<dtv::Cassette>(std::move(loaded_cassette).take());
    if (args.mode == "record") {
      auto from_env = dtv::http_backend_from_env();
      if (!from_env.ok()) return fail(from_env.error());
      http = std::move(from_env).take();
      cassette_backend = std::make_unique<dtv::CassetteBackend>(
          *cassette, dtv::CassetteMode::Record, http.get());
      backend_name = http->name();
    } else {
      cassette_backend =
          std::make_unique<dtv::CassetteBackend>(*cassette, dtv::CassetteMode::Replay);
      backend_name = "replay";
    }
    backend = cassette_backend.get();
  } else {
    return fail({dtv::ErrCode::BadInput, "unknown mode '" + args.mode + "'"});
  }

  dtv::BuiltinProver prover;
  auto runs = dtv::run_many(problems, config.value(), *backend, prover,
                            dtv::builtin_demo_pool(), args.workers);
  if (!runs.ok()) return fail(runs.error());

  if (cassette) cassette_hex = dtv::cassette_digest(*cassette);
  auto report = dtv::build_report(problems, runs.value(), config.value(), backend_name,
                                  {0, args.curve_rounds}, cassette_hex);
  if (!report.ok()) return fail(report.error());
  auto dir = dtv::write_run_dir(args.out_dir, config.value(), report.value(), runs.value());
  if (!dir.ok()) return fail(dir.error());
  std::cout << dir.value() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"answer selection via formal verification"};
  app.require_subcommand(1);

  std::string parse_file;
  auto* parse_cmd = app.add_subcommand("parse", "parse a statement file and print it");
  parse_cmd->add_option("file", parse_file, "statement file")->required();

  std::string prove_file;
  long long prove_budget = 200000;
  auto* prove_cmd = app.add_subcommand("prove", "parse a statement file and try to prove it");
  prove_cmd->add_option("file", prove_file, "statement file")->required();
  prove_cmd->add_option("--budget", prove_budget, "prover work budget");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run the selection pipeline");
  run_cmd->add_option("dataset", run_args.dataset,
                      "dataset file (replay/record) or problem count (synthetic)")
      ->required();
  run_cmd->add_option("--mode", run_args.mode, "record | replay | synthetic")
      ->check(CLI::IsMember({"record", "replay", "synthetic"}));
  run_cmd->add_option("--cassette", run_args.cassette_path, "cassette file");
  run_cmd->add_option("--out-dir", run_args.out_dir, "directory for run outputs");
  run_cmd->add_option("--workers", run_args.workers, "worker threads");
  run_cmd->add_option("--curve-rounds", run_args.curve_rounds,
                      "subsample rounds for the samples curve (0 disables)");
  run_cmd->add_option("--synthetic-params", run_args.synthetic_params_file,
                      "JSON file of synthetic world parameters");
  run_args.config.add_to(*run_cmd);

  std::string eval_dir;
  auto* eval_cmd = app.add_subcommand("eval", "print the report from a run directory");
  eval_cmd->add_option("run_dir", eval_dir, "run directory")->required();

  std::string critique_file;
  std::string critique_cassette;
  auto* critique_cmd =
      app.add_subcommand("critique", "score a statement pair with the faithfulness filter");
  critique_cmd->add_option("file", critique_file, "JSON file with informal/formal fields")
      ->required();
  critique_cmd->add_option("--cassette", critique_cassette, "replay scores from this cassette");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (parse_cmd->parsed()) return run_parse(parse_file);
  if (prove_cmd->parsed()) return run_prove(prove_file, prove_budget);
  if (run_cmd->parsed()) return run_run(run_args);
  if (eval_cmd->parsed()) return run_eval(eval_dir);
  if (critique_cmd->parsed()) return run_critique(critique_file, critique_cassette);
  return 2;
}
