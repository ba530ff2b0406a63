#include <doctest.h>

#include "annimpute/util/json_io.hpp"
#include "helpers.hpp"
#include "pipeline.hpp"

namespace {
const auto run = pipeline::run_quiet;
}  // namespace

TEST_CASE("exit codes") {
  auto dir = testutil::temp_dir("cli_codes");
  CHECK(run(std::vector<std::string>{"frobnicate"}) == 1);
  CHECK(run(std::vector<std::string>{}) == 1);
  CHECK(run({"-q", "synth", "--items", "0", "--out", (dir / "s").string()}) != 0);
  CHECK(run({"-q", "analyze", "--data", (dir / "missing").string(), "--out", (dir / "a").string()}) == 1);
  CHECK(run({"-q", "analyze", "--data", (dir / "missing").string(), "--imputed", "x=y.csv", "--out",
             (dir / "a").string()}) == 2);
  CHECK(run({"-q", "score", "--prompts", (dir / "missing").string(), "--cache", "c", "--out",
             (dir / "b").string()}) == 2);
}

TEST_CASE("synth and analyze are reproducible") {
  auto dir = testutil::temp_dir("cli_repro");
  for (const char* name : {"a", "b"}) {
    const std::string base = (dir / name).string();
    REQUIRE(run({"-q", "synth", "--items", "30", "--annotators", "8", "--seed", "4", "--out",
                 base + "/synth"}) == 0);
    REQUIRE(run({"-q", "analyze", "--data", base + "/synth", "--imputed",
                 "truth=" + base + "/synth/truth.csv", "--out", base + "/analyze"}) == 0);
  }
  CHECK(pipeline::run_hash(dir / "a/synth") == pipeline::run_hash(dir / "b/synth"));
  CHECK(pipeline::run_hash(dir / "a/analyze") == pipeline::run_hash(dir / "b/analyze"));
  CHECK(testutil::slurp(dir / "a/analyze/report.html") == testutil::slurp(dir / "b/analyze/report.html"));

  // A finished run directory is never overwritten.
  REQUIRE(run({"-q", "synth", "--items", "30", "--annotators", "8", "--seed", "4", "--out",
               (dir / "a/synth").string()}) == 0);
  CHECK(std::filesystem::exists(dir / "a/synth-1/manifest.json"));
}

TEST_CASE("replayed scores match the recorded table") {
  auto dir = testutil::temp_dir("cli_replay");
  REQUIRE(run(pipeline::replay_promptgen_args(dir / "prompts")) == 0);
  REQUIRE(run({"-q", "score", "--prompts", (dir / "prompts").string(), "--cache",
               pipeline::replay_cache(), "--out", (dir / "score").string()}) == 0);
  CHECK(testutil::slurp(dir / "score/scores/table.csv") ==
        testutil::slurp(std::string(ANNIMPUTE_TEST_DATA) + "/replay/expected_table.csv"));

  // Replay never guesses: an empty cache is a data error.
  auto empty = dir / "empty.ndjson";
  CHECK(run({"-q", "score", "--prompts", (dir / "prompts").string(), "--cache", empty.string(),
             "--out", (dir / "miss").string()}) == 2);
}
