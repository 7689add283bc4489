#include <catch_amalgamated.hpp>

#include <sstream>

#include "support/support.hpp"

using namespace cookplan;
using support::data;
using support::q;
using support::run_cli;

namespace {

std::string fixtures() { return " --fixtures " + q(data("fixtures")); }

/// Writes the pipeline artifacts for `recipe` on the curated scenario into `dir`.
support::CommandResult run_pipeline(const std::string& recipe, const std::filesystem::path& dir,
                                    const std::string& extra = "") {
  return run_cli("pipeline --recipe " + q(data("recipes/" + recipe + ".txt")) + " --scenario " +
                 q(data("scenarios/" + recipe + ".curated.scn")) + fixtures() + " --out " + q(dir) + extra);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("usage problems exit with 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("plan --scenario " + q(data("scenarios/sunny-side-up.curated.scn"))).exit_code == 1);
  CHECK(run_cli("plan --scenario /no/such/file.scn --goals /no/such/goals.txt").exit_code == 1);
  CHECK(run_cli("emit-domain --report").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("malformed inputs exit with 2") {
  const auto dir = support::scratch("cli-parse");
  pipeline::write_text(dir / "bad.txt", "1. pour(egg)\n");
  CHECK(run_cli("compile --sequence " + q(dir / "bad.txt")).exit_code == 2);
  pipeline::write_text(dir / "contradiction.txt", "1. turn-on-stove(pot), turn-off-stove(pot)\n");
  const auto r = run_cli("compile --sequence " + q(dir / "contradiction.txt"), true);
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("both true and false"));
  pipeline::write_text(dir / "bad.scn", "robot-at = nowhere\n");
  CHECK(run_cli("emit-domain --scenario " + q(dir / "bad.scn")).exit_code == 2);
}

TEST_CASE("an unsolvable scenario exits with 3 and names the step") {
  const auto dir = support::scratch("cli-unsolvable");
  pipeline::write_text(dir / "seq.txt", "1. pour(egg, pot)\n");
  REQUIRE(run_cli("compile --sequence " + q(dir / "seq.txt") + " --out " + q(dir / "goals.txt")).exit_code == 0);
  const auto r = run_cli("plan --scenario " + q(data("scenarios/forced-unsolvable.scn")) + " --goals " +
                             q(dir / "goals.txt"),
                         true);
  CHECK(r.exit_code == 3);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("step 1 is unsolvable"));
}

TEST_CASE("an exhausted search budget exits with 3") {
  const auto dir = support::scratch("cli-budget");
  REQUIRE(run_cli("convert --recipe " + q(data("recipes/broccoli.txt")) + fixtures() + " --out " +
                  q(dir / "seq.txt"))
              .exit_code == 0);
  REQUIRE(run_cli("compile --sequence " + q(dir / "seq.txt") + " --out " + q(dir / "goals.txt")).exit_code == 0);
  CHECK(run_cli("plan --scenario " + q(data("scenarios/broccoli.kitchen.scn")) + " --goals " + q(dir / "goals.txt") +
                " --budget 3")
            .exit_code == 3);
}

TEST_CASE("backend failures exit with 4") {
  const auto dir = support::scratch("cli-backend");
  pipeline::write_text(dir / "recipe.txt", "Toast some bread.\n");
  const auto r = run_cli("convert --recipe " + q(dir / "recipe.txt") + fixtures(), true);
  CHECK(r.exit_code == 4);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("backend error (fixture-missing)"));
}

TEST_CASE("a tampered plan exits with 5") {
  const auto dir = support::scratch("cli-tamper");
  REQUIRE(run_pipeline("poached-egg", dir).exit_code == 0);
  const auto validate = "validate --scenario " + q(data("scenarios/poached-egg.curated.scn")) + " --goals " +
                        q(dir / "goals.txt") + " --plan " + q(dir / "plan.txt");
  CHECK(run_cli(validate).exit_code == 0);

  auto lines = lines_of(support::read(dir / "plan.txt"));
  const auto action = std::find_if(lines.begin(), lines.end(), [](const std::string& l) { return l.rfind("  ", 0) == 0; });
  REQUIRE(action != lines.end());
  lines.erase(action);
  std::string tampered;
  for (const auto& l : lines) tampered += l + "\n";
  pipeline::write_text(dir / "plan.txt", tampered);
  const auto r = run_cli(validate);
  CHECK(r.exit_code == 5);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("invalid actions="));
}

TEST_CASE("a state change that never arrives exits with 6") {
  const auto dir = support::scratch("cli-timeout");
  REQUIRE(run_pipeline("sunny-side-up", dir).exit_code == 0);
  const auto r = run_cli("simulate --scenario " + q(data("scenarios/sunny-side-up.curated.scn")) + " --plan " +
                         q(dir / "plan.txt") + " --oracle cook=delay:100 --wait-timeout 5");
  CHECK(r.exit_code == 6);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("timeout "));
}

TEST_CASE("the pipeline writes every artifact and a manifest of their digests") {
  const auto dir = support::scratch("cli-pipeline");
  REQUIRE(run_pipeline("butter-sunny-side-up", dir).exit_code == 0);
  const auto manifest = lines_of(support::read(dir / "manifest.txt"));
  CHECK(manifest.size() == 9);
  for (const auto& line : manifest) {
    std::istringstream in(line);
    std::string stage, name, digest;
    in >> stage >> name >> digest;
    INFO(line);
    CHECK(digest == converter::sha256_hex(support::read(dir / name)));
  }
  CHECK(support::read(dir / "validation.txt").rfind("valid ", 0) == 0);
}

TEST_CASE("a failed pipeline still records what it produced") {
  const auto dir = support::scratch("cli-pipeline-fail");
  pipeline::write_text(dir / "recipe.txt", "Toast some bread.\n");
  const auto r = run_cli("pipeline --recipe " + q(dir / "recipe.txt") + " --scenario " +
                         q(data("scenarios/sunny-side-up.curated.scn")) + fixtures() + " --out " + q(dir / "run"));
  CHECK(r.exit_code == 4);
  const auto manifest = support::read(dir / "run" / "manifest.txt");
  CHECK_THAT(manifest, Catch::Matchers::ContainsSubstring("convert prompt.txt"));
  CHECK_THAT(manifest, !Catch::Matchers::ContainsSubstring("plan.txt"));
}

TEST_CASE("resuming from the plan stage reproduces the same artifacts") {
  const auto dir = support::scratch("cli-resume");
  REQUIRE(run_pipeline("scrambled-egg", dir).exit_code == 0);
  const auto before = support::read(dir / "manifest.txt");
  std::filesystem::remove(dir / "plan.txt");
  std::filesystem::remove(dir / "trace.txt");
  pipeline::write_text(dir / "transcript.jsonl", "untouched\n");
  REQUIRE(run_pipeline("scrambled-egg", dir, " --from plan").exit_code == 0);
  CHECK(support::read(dir / "transcript.jsonl") == "untouched\n");
  const auto after = lines_of(support::read(dir / "manifest.txt"));
  for (const auto& line : lines_of(before)) {
    if (line.find("transcript") != std::string::npos) continue;
    CHECK(std::find(after.begin(), after.end(), line) != after.end());
  }
}

TEST_CASE("every subcommand is byte-for-byte reproducible") {
  const auto dir = support::scratch("cli-determinism");
  REQUIRE(run_pipeline("poached-egg", dir).exit_code == 0);
  const auto scn = q(data("scenarios/poached-egg.curated.scn"));
  REQUIRE(run_cli("staterec synth --seed 3 --out " + q(dir / "f.csv") + " --annotation-out " + q(dir / "a.txt"))
              .exit_code == 0);
  REQUIRE(run_cli("staterec train --features " + q(dir / "f.csv") + " --annotation " + q(dir / "a.txt") +
                  " --out " + q(dir / "probe.txt"))
              .exit_code == 0);
  const std::vector<std::string> commands = {
      "convert --recipe " + q(data("recipes/poached-egg.txt")) + fixtures(),
      "compile --sequence " + q(dir / "sequence.txt") + " --scenario " + scn,
      "plan --scenario " + scn + " --goals " + q(dir / "goals.txt"),
      "validate --scenario " + scn + " --goals " + q(dir / "goals.txt") + " --plan " + q(dir / "plan.txt"),
      "simulate --scenario " + scn + " --plan " + q(dir / "plan.txt") + " --oracle delay:7 --oracle heat=delay:30",
      "emit-domain",
      "emit-domain --scenario " + scn + " --problem-out -",
      "staterec synth --seed 9 --dim 4 --frames 50 --change 20",
      "staterec train --features " + q(dir / "f.csv") + " --annotation " + q(dir / "a.txt"),
      "staterec detect --probe " + q(dir / "probe.txt") + " --features " + q(dir / "f.csv"),
      "staterec eval --probe " + q(dir / "probe.txt") + " --features " + q(dir / "f.csv") + " --annotation " +
          q(dir / "a.txt"),
  };
  for (const auto& c : commands) {
    INFO(c);
    const auto first = run_cli(c);
    const auto second = run_cli(c);
    CHECK(first.exit_code == 0);
    CHECK_FALSE(first.out.empty());
    CHECK(first.out == second.out);
  }
}

TEST_CASE("detection commands report a miss with 6") {
  const auto dir = support::scratch("cli-detect-miss");
  REQUIRE(run_cli("staterec synth --seed 3 --out " + q(dir / "f.csv") + " --annotation-out " + q(dir / "a.txt"))
              .exit_code == 0);
  REQUIRE(run_cli("staterec train --features " + q(dir / "f.csv") + " --annotation " + q(dir / "a.txt") +
                  " --out " + q(dir / "probe.txt"))
              .exit_code == 0);
  const auto probe = staterec::load_probe(support::read(dir / "probe.txt"));
  // Every frame sits far on the pre-change side of the decision boundary.
  staterec::FeatureSeries quiet;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> row(probe.mean.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = probe.mean[j] - 10.0 * probe.scale[j] * (probe.weights[j] > 0 ? 1.0 : -1.0);
    }
    quiet.timestamps.push_back(staterec::frame_time(static_cast<std::size_t>(i)));
    quiet.features.push_back(std::move(row));
  }
  pipeline::write_text(dir / "quiet.csv", staterec::write_feature_csv(quiet));
  const auto r = run_cli("staterec detect --probe " + q(dir / "probe.txt") + " --features " + q(dir / "quiet.csv"));
  CHECK(r.exit_code == 6);
  CHECK(r.out == "detected none\n");
  CHECK(run_cli("staterec eval --probe " + q(dir / "probe.txt") + " --features " + q(dir / "quiet.csv") +
                " --annotation " + q(dir / "a.txt"))
            .exit_code == 6);
}
