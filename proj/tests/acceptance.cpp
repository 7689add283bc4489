// Acceptance report: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--expect-red name,...]
// Exits 0 when the failing criteria are exactly the listed ones.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "cookplan/sim/validator.hpp"
#include "cookplan/staterec/probe.hpp"
#include "cookplan/staterec/series.hpp"
#include "support/support.hpp"

using namespace cookplan;
using support::data;
using support::q;
using support::run_cli;

namespace {

// Pinned thresholds.
constexpr double kPlanValiditySeconds = 10.0;
constexpr std::size_t kOptimalityCases = 50;
constexpr std::size_t kOptimalityStateLimit = 100000;
constexpr double kOptimalitySeconds = 60.0;
constexpr std::size_t kMinExtractionFixtures = 6;
constexpr double kGradientTolerance = 1e-4;
constexpr int kGradientInstances = 20;
constexpr double kTrainingAccuracy = 0.99;
constexpr double kTrainingSeconds = 10.0;
constexpr int kDetectionSeeds = 100;
constexpr double kDetectionWindow = 0.5;
constexpr double kDetectionRate4 = 0.95;
constexpr double kDetectionRate6 = 0.99;
constexpr double kDetectionSeconds = 60.0;
constexpr std::size_t kDim = 8, kFrames = 600, kChange = 300;
constexpr int kComparisonSeeds = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> check;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << v;
  return out.str();
}

std::string sci(double v) {
  std::ostringstream out;
  out.setf(std::ios::scientific);
  out.precision(1);
  out << v;
  return out.str();
}

const std::vector<std::string>& all_recipes() {
  static const std::vector<std::string> names = [] {
    auto n = support::known_recipe_names();
    for (const auto& u : support::unknown_recipe_names()) n.push_back(u);
    return n;
  }();
  return names;
}

const std::vector<std::string> kVariants = {"curated", "kitchen"};

/// Replays `names` with the schema-level replayer, calling `visit` before each
/// action with the state it starts from.
sim::AtomSet replay(const sim::Replayer& r, sim::AtomSet state, const std::vector<std::string>& names,
                    const std::function<void(const sim::AtomSet&, const std::string&)>& visit = {}) {
  for (const auto& n : names) {
    if (visit) visit(state, n);
    r.apply(state, n);
  }
  return state;
}

bool appliance_on(const sim::AtomSet& s) {
  if (s.count("(tap-open)")) return true;
  return std::any_of(s.begin(), s.end(), [](const std::string& a) { return a.rfind("(stove-on ", 0) == 0; });
}

std::size_t count_prefix(const std::vector<std::string>& names, const std::string& prefix) {
  return static_cast<std::size_t>(
      std::count_if(names.begin(), names.end(), [&](const std::string& n) { return n.rfind(prefix, 0) == 0; }));
}

// --- plan structure ---------------------------------------------------------

Outcome plan_validity() {
  const auto t0 = Clock::now();
  int valid = 0, runs = 0;
  std::string failures;
  for (const auto& recipe : all_recipes()) {
    for (const auto& variant : kVariants) {
      ++runs;
      const auto run = support::run_recipe(recipe, variant);
      const auto label = recipe + "/" + variant;
      if (!run.result.solved()) {
        failures += " " + label + ":unsolved";
        continue;
      }
      const auto file = goals::parse_plan_file(run.plan_text);
      const auto replayer = run.kitchen.replayer();
      const auto report = sim::validate(replayer, file, run.goals);
      bool ok = report.ok();
      auto state = replayer.initial();
      for (const auto& step : file.steps) {
        std::vector<std::string> names;
        for (const auto& a : step.actions) names.push_back(a.name);
        state = replay(replayer, state, names);
        ok = ok && state.count("(hand-free arm1)") && state.count("(hand-free arm2)");
      }
      ok = ok && !appliance_on(state);
      if (ok) ++valid;
      else failures += " " + label;
    }
  }
  const double elapsed = seconds_since(t0);
  return {valid == runs && runs == 10 && elapsed < kPlanValiditySeconds,
          std::to_string(valid) + "/" + std::to_string(runs) + " runs valid with empty hands at every boundary and " +
              "stove and tap off at the end in " + fmt(elapsed) + " s (limit " + fmt(kPlanValiditySeconds, 0) +
              " s)" + (failures.empty() ? "" : ";" + failures)};
}

Outcome water_fetch() {
  const auto run = support::run_recipe("poached-egg", "curated");
  if (!run.result.solved()) return {false, "poached-egg curated plan unsolved"};
  const auto names = goals::parse_plan_file(run.plan_text).action_names();
  const std::vector<std::string> wanted = {"(hold measuring-cup ", "(open-tap ", "(fetch-water ", "(close-tap ",
                                           "(transfer water measuring-cup pot "};
  std::size_t matched = 0;
  for (const auto& n : names) {
    if (matched < wanted.size() && n.rfind(wanted[matched], 0) == 0) ++matched;
  }
  return {matched == wanted.size(),
          std::to_string(matched) + "/" + std::to_string(wanted.size()) +
              " of hold measuring-cup, open-tap, fetch-water, close-tap, transfer water into pot found in order"};
}

Outcome move_monotonicity() {
  bool pass = true;
  std::string detail;
  for (const auto& recipe : support::known_recipe_names()) {
    std::size_t moves[2] = {0, 0};
    for (std::size_t v = 0; v < 2; ++v) {
      const auto run = support::run_recipe(recipe, kVariants[v]);
      if (!run.result.solved()) return {false, recipe + "/" + kVariants[v] + " unsolved"};
      moves[v] = count_prefix(goals::parse_plan_file(run.plan_text).action_names(), "(move-to ");
    }
    pass = pass && moves[1] > moves[0];
    detail += (detail.empty() ? "" : ", ") + recipe + " " + std::to_string(moves[0]) + " < " +
              std::to_string(moves[1]);
  }
  return {pass, "move-to curated < kitchen: " + detail};
}

// --- planner ------------------------------------------------------------------

/// Random small scenarios with their optimal plans, shared with the safety check.
struct RandomPlans {
  std::size_t checked = 0, agree = 0, skipped = 0;
  double seconds = 0.0;
  std::vector<std::pair<pipeline::Kitchen, std::vector<std::string>>> plans;
};

const RandomPlans& random_plans() {
  static const RandomPlans result = [] {
    RandomPlans out;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240501);
    for (int attempt = 0; attempt < 2000 && out.checked < kOptimalityCases; ++attempt) {
      const auto c = support::random_case(rng);
      goals::StepGoals sg;
      try {
        sg = goals::compile_step(c.sequence.steps.front());
      } catch (const ModelError&) {
        continue;
      }
      pipeline::Kitchen k(kitchen::parse_scenario(c.scenario_text));
      const auto goal = planner::resolve_goal(k.task, sg.goal());
      bool exhausted = false;
      const auto bfs = support::bfs_plan_length(k.task, k.task.init, goal, kOptimalityStateLimit, &exhausted);
      if (exhausted) {
        ++out.skipped;
        continue;
      }
      const auto r = planner::plan(k.task, k.task.init, goal, {});
      ++out.checked;
      if (!bfs) {
        if (r.status == planner::PlanStatus::unsolvable) ++out.agree;
      } else if (r.solved() && r.plan.actions.size() == *bfs) {
        ++out.agree;
        auto names = planner::action_names(k.task, r.plan);
        out.plans.emplace_back(std::move(k), std::move(names));
      }
    }
    out.seconds = seconds_since(t0);
    return out;
  }();
  return result;
}

Outcome optimality() {
  const auto& r = random_plans();
  return {r.checked >= kOptimalityCases && r.agree == r.checked && r.seconds < kOptimalitySeconds,
          std::to_string(r.agree) + "/" + std::to_string(r.checked) +
              " random scenarios match breadth-first plan length (" + std::to_string(r.skipped) +
              " skipped above " + std::to_string(kOptimalityStateLimit) + " states) in " + fmt(r.seconds) +
              " s (limit " + fmt(kOptimalitySeconds, 0) + " s)"};
}

Outcome safety() {
  std::size_t plans = 0, moves = 0, violations = 0;
  auto check = [&](const sim::Replayer& replayer, const std::vector<std::string>& names) {
    ++plans;
    replay(replayer, replayer.initial(), names, [&](const sim::AtomSet& s, const std::string& a) {
      if (a.rfind("(move-to ", 0) != 0) return;
      ++moves;
      if (appliance_on(s)) ++violations;
    });
  };
  for (const auto& recipe : all_recipes()) {
    for (const auto& variant : kVariants) {
      const auto run = support::run_recipe(recipe, variant);
      if (!run.result.solved()) return {false, recipe + "/" + variant + " unsolved"};
      check(run.kitchen.replayer(), goals::parse_plan_file(run.plan_text).action_names());
    }
  }
  for (const auto& [k, names] : random_plans().plans) check(k.replayer(), names);
  return {violations == 0, std::to_string(violations) + " move-to actions with the tap open or a stove on, out of " +
                               std::to_string(moves) + " across " + std::to_string(plans) + " plans"};
}

// --- extraction ---------------------------------------------------------------

Outcome extraction() {
  const auto manifest = nlohmann::json::parse(support::read(data("extraction/manifest.json")));
  const auto known = funcseq::KnownObjects::from_scenario(kitchen::parse_scenario(
      support::read(data("extraction") / manifest.at("scenario").get<std::string>())));
  std::size_t total = 0, recovered = 0, exact = 0;
  std::string failures;
  for (const auto& entry : manifest.at("fixtures")) {
    ++total;
    const auto file = entry.at("file").get<std::string>();
    try {
      const auto fs = converter::extract_sequence(support::read(data("extraction/" + file)));
      ++recovered;
      std::vector<std::string> got;
      for (const auto& d : funcseq::validate_sequence(fs, known)) got.push_back(d.code);
      auto expected = entry.at("expected").get<std::vector<std::string>>();
      std::sort(got.begin(), got.end());
      std::sort(expected.begin(), expected.end());
      if (got == expected) ++exact;
      else failures += " " + file;
    } catch (const Error&) {
      failures += " " + file + ":unparsed";
    }
  }
  return {total >= kMinExtractionFixtures && recovered == total && exact == total,
          std::to_string(recovered) + "/" + std::to_string(total) + " noisy responses recovered, " +
              std::to_string(exact) + "/" + std::to_string(total) + " flag exactly the seeded defects" +
              (failures.empty() ? "" : ";" + failures)};
}

// --- staterec -----------------------------------------------------------------

double gradient_relative_error(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim_dist(1, 12), n_dist(5, 60);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = dim_dist(rng), n = n_dist(rng);
  staterec::Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d);
    for (auto& v : row) v = normal(rng);
    ds.x.push_back(std::move(row));
    ds.y.push_back(static_cast<int>(i % 2));
  }
  std::vector<double> w(d);
  for (auto& v : w) v = normal(rng);
  const double b = normal(rng);
  const double l2 = std::exp(normal(rng));
  std::vector<double> gw;
  double gb = 0.0;
  staterec::objective(ds, w, b, l2, &gw, &gb);
  gw.push_back(gb);
  const double h = 1e-5;
  double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
  for (std::size_t j = 0; j <= d; ++j) {
    auto up = w, down = w;
    double bu = b, bd = b;
    if (j < d) {
      up[j] += h;
      down[j] -= h;
    } else {
      bu += h;
      bd -= h;
    }
    const double numeric = (staterec::objective(ds, up, bu, l2) - staterec::objective(ds, down, bd, l2)) / (2 * h);
    diff += (gw[j] - numeric) * (gw[j] - numeric);
    norm_a += gw[j] * gw[j];
    norm_n += numeric * numeric;
  }
  return std::sqrt(diff) / std::max({std::sqrt(norm_a), std::sqrt(norm_n), 1e-12});
}

Outcome probe_training() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < kGradientInstances; ++i) worst = std::max(worst, gradient_relative_error(rng));

  staterec::TrainLog log;
  const std::vector<staterec::AnnotatedSeries> four = {staterec::synthesize_series(kDim, kFrames, kChange, 4.0, 1)};
  staterec::train_probe(four, {}, &log);
  std::size_t increases = 0;
  for (std::size_t i = 1; i < log.objective.size(); ++i) increases += log.objective[i] > log.objective[i - 1];

  const std::vector<staterec::AnnotatedSeries> six = {staterec::synthesize_series(kDim, kFrames, kChange, 6.0, 42)};
  const double accuracy = staterec::training_accuracy(staterec::train_probe(six), six);
  const double elapsed = seconds_since(t0);
  return {worst <= kGradientTolerance && increases == 0 && accuracy >= kTrainingAccuracy &&
              elapsed < kTrainingSeconds,
          "max gradient error " + sci(worst) + " (limit " + sci(kGradientTolerance) + ") over " + std::to_string(kGradientInstances) +
              " instances, " + std::to_string(increases) + " objective increases in " +
              std::to_string(log.objective.size()) + " iterations, 6 sigma accuracy " + fmt(accuracy * 100, 2) +
              "%, " + fmt(elapsed) + " s"};
}

/// Held-out detection error for one seed: train on one or more series and
/// evaluate on an independent series with the same change point.
std::optional<double> held_out_error(double separation, int seed, int training_series) {
  std::vector<staterec::AnnotatedSeries> train;
  for (int i = 0; i < training_series; ++i) {
    train.push_back(staterec::synthesize_series(kDim, kFrames, kChange, separation,
                                                static_cast<std::uint64_t>(seed) * 16 + 1 + i));
  }
  const auto test =
      staterec::synthesize_series(kDim, kFrames, kChange, separation, static_cast<std::uint64_t>(seed) * 16 + 15);
  return staterec::evaluate(staterec::train_probe(train), test);
}

Outcome detection_accuracy() {
  const auto t0 = Clock::now();
  auto rate = [](double separation, int* misses, int* early) {
    int within = 0;
    for (int seed = 0; seed < kDetectionSeeds; ++seed) {
      const auto d = held_out_error(separation, seed, 1);
      if (!d) ++*misses;
      else if (*d < -kDetectionWindow) ++*early;
      if (d && std::abs(*d) <= kDetectionWindow + 1e-9) ++within;
    }
    return static_cast<double>(within) / kDetectionSeeds;
  };
  int miss4 = 0, early4 = 0, miss6 = 0, early6 = 0;
  const double r4 = rate(4.0, &miss4, &early4);
  const double r6 = rate(6.0, &miss6, &early6);
  const double elapsed = seconds_since(t0);
  return {r4 >= kDetectionRate4 && r6 >= kDetectionRate6 && elapsed < kDetectionSeconds,
          "within " + fmt(kDetectionWindow, 1) + " s: 4 sigma " + fmt(r4 * 100, 0) + "% (need " +
              fmt(kDetectionRate4 * 100, 0) + "%, " + std::to_string(early4) + " early, " + std::to_string(miss4) +
              " missed), 6 sigma " + fmt(r6 * 100, 0) + "% (need " + fmt(kDetectionRate6 * 100, 0) + "%, " +
              std::to_string(early6) + " early, " + std::to_string(miss6) + " missed), " + fmt(elapsed) + " s"};
}

Outcome one_vs_three() {
  // A miss counts as an infinitely large error.
  const double miss = std::numeric_limits<double>::infinity();
  std::vector<double> one, three;
  int miss1 = 0, miss3 = 0;
  for (int seed = 0; seed < kComparisonSeeds; ++seed) {
    const auto a = held_out_error(4.0, seed, 1);
    const auto b = held_out_error(4.0, seed, 3);
    miss1 += !a;
    miss3 += !b;
    one.push_back(a ? std::abs(*a) : miss);
    three.push_back(b ? std::abs(*b) : miss);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  const double m1 = median(one), m3 = median(three);
  return {m3 <= m1, "median |difference| 3-series " + fmt(m3, 2) + " s <= 1-series " + fmt(m1, 2) + " s over " +
                        std::to_string(kComparisonSeeds) + " seeds at 4 sigma (misses " + std::to_string(miss3) +
                        " vs " + std::to_string(miss1) + ")"};
}

// --- command line ---------------------------------------------------------------

Outcome determinism() {
  const auto dir = support::scratch("acceptance-determinism");
  const auto fixtures = " --fixtures " + q(data("fixtures"));
  const auto scn = q(data("scenarios/poached-egg.curated.scn"));
  const auto pipe = [&](const std::string& out) {
    return run_cli("pipeline --recipe " + q(data("recipes/poached-egg.txt")) + " --scenario " + scn + fixtures +
                   " --out " + q(dir / out));
  };
  if (pipe("a").exit_code != 0 || pipe("b").exit_code != 0) return {false, "pipeline failed"};
  run_cli("staterec synth --seed 7 --out " + q(dir / "f.csv") + " --annotation-out " + q(dir / "a.txt"));
  run_cli("staterec train --features " + q(dir / "f.csv") + " --annotation " + q(dir / "a.txt") + " --out " +
          q(dir / "probe.txt"));
  const auto run_dir = q(dir / "a");
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"convert", "convert --recipe " + q(data("recipes/poached-egg.txt")) + fixtures},
      {"compile", "compile --sequence " + q(dir / "a" / "sequence.txt") + " --scenario " + scn},
      {"plan", "plan --scenario " + scn + " --goals " + q(dir / "a" / "goals.txt")},
      {"validate",
       "validate --scenario " + scn + " --goals " + q(dir / "a" / "goals.txt") + " --plan " + q(dir / "a" / "plan.txt")},
      {"simulate", "simulate --scenario " + scn + " --plan " + q(dir / "a" / "plan.txt") + " --oracle delay:7"},
      {"emit-domain", "emit-domain --scenario " + scn + " --problem-out -"},
      {"staterec synth", "staterec synth --seed 7"},
      {"staterec train", "staterec train --features " + q(dir / "f.csv") + " --annotation " + q(dir / "a.txt")},
      {"staterec detect", "staterec detect --probe " + q(dir / "probe.txt") + " --features " + q(dir / "f.csv")},
      {"staterec eval", "staterec eval --probe " + q(dir / "probe.txt") + " --features " + q(dir / "f.csv") +
                            " --annotation " + q(dir / "a.txt")},
  };
  std::size_t same = 0;
  std::string differing;
  for (const auto& [name, cmd] : commands) {
    const auto a = run_cli(cmd), b = run_cli(cmd);
    if (a.exit_code == b.exit_code && !a.out.empty() && a.out == b.out) ++same;
    else differing += " " + name;
  }
  const bool pipeline_same = support::read(dir / "a" / "manifest.txt") == support::read(dir / "b" / "manifest.txt");
  if (!pipeline_same) differing += " pipeline";
  return {same == commands.size() && pipeline_same,
          std::to_string(same + pipeline_same) + "/" + std::to_string(commands.size() + 1) +
              " subcommands byte-identical on rerun" + (differing.empty() ? "" : ";" + differing)};
}

Outcome end_to_end() {
  const auto dir = support::scratch("acceptance-e2e");
  std::size_t ok = 0, runs = 0;
  std::string detail;
  for (const auto& recipe : support::unknown_recipe_names()) {
    for (const auto& variant : kVariants) {
      ++runs;
      const auto out = dir / (recipe + "-" + variant);
      const auto r = run_cli("pipeline --backend fixture --recipe " + q(data("recipes/" + recipe + ".txt")) +
                             " --scenario " + q(data("scenarios/" + recipe + "." + variant + ".scn")) +
                             " --fixtures " + q(data("fixtures")) + " --out " + q(out));
      const bool good = r.exit_code == 0 && std::filesystem::exists(out / "trace.txt") &&
                        support::read(out / "validation.txt").rfind("valid ", 0) == 0 &&
                        support::read(out / "trace.txt").find("timeout") == std::string::npos;
      ok += good;
      if (!good) detail += " " + recipe + "/" + variant + ":exit" + std::to_string(r.exit_code);
    }
  }
  return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) +
                          " fixture-backend pipelines for the unknown recipes end with a valid, complete trace" +
                          (detail.empty() ? "" : ";" + detail)};
}

std::set<std::string> split_names(const std::string& list) {
  std::set<std::string> out;
  std::istringstream in(list);
  for (std::string name; std::getline(in, name, ',');) {
    if (!name.empty()) out.insert(name);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expect_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-red" && i + 1 < argc) {
      expect_red = split_names(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--expect-red name,...]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {"plan-validity", plan_validity},
      {"water-fetch", water_fetch},
      {"move-monotonicity", move_monotonicity},
      {"planner-optimality", optimality},
      {"safety", safety},
      {"extraction-robustness", extraction},
      {"probe-training", probe_training},
      {"detection-accuracy", detection_accuracy},
      {"one-vs-three-series", one_vs_three},
      {"determinism", determinism},
      {"end-to-end", end_to_end},
  };

  std::set<std::string> red;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) red.insert(c.name);
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }

  for (const auto& name : expect_red) {
    if (!red.count(name)) std::cout << "note: " << name << " was expected to fail but passed" << std::endl;
  }
  for (const auto& name : red) {
    if (!expect_red.count(name)) std::cout << "note: " << name << " failed unexpectedly" << std::endl;
  }
  return red == expect_red ? 0 : 1;
}
