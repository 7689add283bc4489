#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "cookplan/converter/backend.hpp"
#include "cookplan/goals/compiler.hpp"
#include "cookplan/goals/recipe_plan.hpp"
#include "cookplan/pipeline.hpp"
#include "cookplan/planner/planner.hpp"

namespace support {

namespace fs = std::filesystem;
using namespace cookplan;

inline fs::path data_dir() { return COOKPLAN_DATA_DIR; }
inline fs::path data(const std::string& rel) { return data_dir() / rel; }
inline std::string read(const fs::path& p) { return pipeline::read_text(p); }

/// Fresh, empty scratch directory under the system temp dir.
inline fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cookplan-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline const std::vector<std::string>& known_recipe_names() {
  static const std::vector<std::string> names = {"sunny-side-up", "poached-egg", "scrambled-egg"};
  return names;
}
inline const std::vector<std::string>& unknown_recipe_names() {
  static const std::vector<std::string> names = {"butter-sunny-side-up", "broccoli"};
  return names;
}

/// Everything produced by running one recipe through the fixture backend.
struct RecipeRun {
  pipeline::Kitchen kitchen;
  funcseq::FunctionSequence sequence;
  goals::CompiledGoals goals;
  goals::RecipePlanResult result;
  std::string plan_text;
};

inline RecipeRun run_recipe(const std::string& recipe, const std::string& variant) {
  auto kitchen = pipeline::load_kitchen(data("scenarios/" + recipe + "." + variant + ".scn"));
  converter::BackendConfig cfg;
  cfg.fixture_dir = data("fixtures");
  const auto conv = converter::convert(read(data("recipes/" + recipe + ".txt")), cfg);
  const auto symbols = goals::scenario_symbols(kitchen.scenario);
  auto compiled = goals::compile_sequence(conv.sequence, &symbols);
  auto result = goals::plan_recipe(kitchen.task, compiled, {});
  std::string text = result.solved() ? goals::print_plan(kitchen.task, result.plan) : std::string();
  return RecipeRun{std::move(kitchen), conv.sequence, std::move(compiled), std::move(result), std::move(text)};
}

/// Breadth-first shortest plan length over the grounded task, written
/// independently of the planner's pruning, heuristic and search. Returns
/// nullopt when the goal is unreachable; sets `exhausted` when more than
/// `state_limit` states were reached before the answer was known.
inline std::optional<std::size_t> bfs_plan_length(const pddl::GroundedTask& task, const pddl::FactSet& start,
                                                  const planner::GoalFacts& goal, std::size_t state_limit,
                                                  bool* exhausted = nullptr) {
  auto holds = [&](const pddl::FactSet& s) {
    for (auto f : goal.positive) {
      if (!s.test(f)) return false;
    }
    for (auto f : goal.negative) {
      if (s.test(f)) return false;
    }
    return true;
  };
  auto key = [](const pddl::FactSet& s) {
    std::string k;
    s.for_each([&](std::uint32_t i) { k += std::to_string(i) + ","; });
    return k;
  };
  if (exhausted) *exhausted = false;
  if (holds(start)) return 0;
  std::unordered_map<std::string, std::size_t> depth{{key(start), 0}};
  std::deque<pddl::FactSet> queue{start};
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    const auto d = depth.at(key(s));
    for (const auto& a : task.actions) {
      bool ok = true;
      for (const auto& lit : a.precondition) {
        if (s.test(lit.fact) != lit.positive) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      auto next = s;
      for (auto f : a.del) next.reset(f);
      for (auto f : a.add) next.set(f);
      if (!depth.emplace(key(next), d + 1).second) continue;
      if (holds(next)) return d + 1;
      if (depth.size() > state_limit) {
        if (exhausted) *exhausted = true;
        return std::nullopt;
      }
      queue.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

/// A small random kitchen and one-step goal.
struct RandomCase {
  std::string scenario_text;
  funcseq::FunctionSequence sequence;
};

inline RandomCase random_case(std::mt19937_64& rng) {
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::vector<std::string> spots = {"stove", "kitchen", "sink"};

  std::string text = "name = random\nrobot = " + pick(spots) + "\n";
  text += "states = cooked-egg, melted-butter, boiled-water\n";
  std::vector<std::string> vessels = {"pot"};
  if (coin(0.5)) vessels.push_back("frying-pan");
  const bool water = coin(0.4);
  if (water) vessels.push_back("measuring-cup");
  for (const auto& v : vessels) text += "[vessel " + v + "]\nat = " + pick(spots) + "\n";
  std::vector<std::string> ingredients = {"egg"};
  if (coin(0.5)) ingredients.push_back("butter");
  for (const auto& i : ingredients) {
    text += "[ingredient " + i + "]\n";
    if (coin(0.25)) text += "in = " + pick(vessels) + "\n";
    else text += "at = " + pick(spots) + "\n";
  }
  if (water) {
    text += "[ingredient water]\n";
    ingredients.push_back("water");
  }

  std::vector<std::string> stove_vessels;
  for (const auto& v : vessels) {
    if (v == "pot" || v == "frying-pan") stove_vessels.push_back(v);
  }
  std::vector<funcseq::FunctionCall> options;
  for (const auto& i : ingredients) {
    for (const auto& v : vessels) options.push_back({"pour", {i, v}, {}});
  }
  for (const auto& v : stove_vessels) {
    options.push_back({"turn-on-stove", {v}, {}});
    options.push_back({"turn-off-stove", {v}, {}});
  }
  options.push_back({"cook", {"egg", "cooked-egg"}, {}});
  if (water) options.push_back({"heat", {"water", "boiled-water"}, {}});

  funcseq::Step step;
  const auto n = std::uniform_int_distribution<int>(1, 2)(rng);
  for (int k = 0; k < n; ++k) step.calls.push_back(options[std::uniform_int_distribution<std::size_t>(
      0, options.size() - 1)(rng)]);
  RandomCase c;
  c.scenario_text = std::move(text);
  c.sequence.steps.push_back(std::move(step));
  return c;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

/// Runs the CLI with `args` (already shell-quoted as needed); stderr is
/// discarded unless `keep_stderr`.
inline CommandResult run_cli(const std::string& args, bool keep_stderr = false) {
  const std::string cmd = std::string("'") + COOKPLAN_CLI + "' " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  CommandResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace support
