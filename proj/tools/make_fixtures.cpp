// Regenerates the bundled worked-example dataset and cassette. The cassette
// records every request the pipeline makes against the scripted oracle, so
// replaying it reproduces the run without any backend. Self-checks that
// verified voting recovers the expected answer on every problem while plain
// voting misses all of them.

#include <cstdio>
#include <filesystem>
#include <string>

#include "dtv/dtv.hpp"
#include "dtv/fixtures.hpp"

int main(int argc, char** argv) {
  std::string out_dir = argc > 1 ? argv[1] : "data/fixtures";
  std::filesystem::create_directories(out_dir);
  std::string problems_path = out_dir + "/problems.jsonl";
  std::string cassette_path = out_dir + "/cassette.jsonl";
  std::filesystem::remove(cassette_path);

  auto problems = dtv::fixture_problems();
  if (auto saved = dtv::save_problems(problems_path, problems); !saved.ok()) {
    std::fprintf(stderr, "error: %s\n", saved.error().render().c_str());
    return 1;
  }

  dtv::FixtureOracle oracle;
  dtv::Cassette cassette(cassette_path);
  dtv::CassetteBackend recorder(cassette, dtv::CassetteMode::Record, &oracle);
  dtv::BuiltinProver prover;
  auto config = dtv::fixture_config();

  auto runs = dtv::run_many(problems, config, recorder, prover, dtv::builtin_demo_pool(), 1);
  if (!runs.ok()) {
    std::fprintf(stderr, "error: %s\n", runs.error().render().c_str());
    return 1;
  }

  bool ok = true;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const auto& run = runs.value()[i];
    dtv::Answer truth = dtv::canonicalize_ground_truth(problems[i].ground_truth);
    std::string selected = run.selection ? dtv::canonical_text(run.selection->answer) : "(none)";
    std::string mode = run.selection ? dtv::selection_mode_name(run.selection->mode) : "-";
    auto plain = dtv::select_with(run.records, dtv::Selector::Majority);
    std::string plain_text = plain.ok() ? dtv::canonical_text(plain.value().answer) : "(none)";
    bool dtv_right = run.selection && dtv::answers_equal(run.selection->answer, truth);
    bool plain_wrong = !plain.ok() || !dtv::answers_equal(plain.value().answer, truth);
    std::printf("%-22s truth=%-4s verified=%s (%s) plain=%s\n", problems[i].id.c_str(),
                problems[i].ground_truth.c_str(), selected.c_str(), mode.c_str(),
                plain_text.c_str());
    if (!dtv_right || !plain_wrong) ok = false;
  }
  std::printf("cassette entries: %zu -> %s\n", cassette.size(), cassette_path.c_str());
  if (!ok) {
    std::fprintf(stderr, "error: fixture expectations not met\n");
    return 1;
  }
  return 0;
}
