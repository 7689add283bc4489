#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/goals/compiler.hpp"
#include "cookplan/pddl/grounding.hpp"
#include "cookplan/planner/planner.hpp"
#include "cookplan/sim/digest.hpp"

namespace cookplan::goals {

using pddl::FactSet;
using pddl::GroundedTask;

struct StepPlan {
  /// Indices into GroundedTask::actions.
  std::vector<std::size_t> actions;
  /// Parallel to `actions`: true for actions the recipe never mentions.
  std::vector<bool> complemented;
  FactSet start;
  FactSet final_state;
};

struct FullPlan {
  std::vector<StepPlan> steps;

  std::vector<std::size_t> concatenated() const {
    std::vector<std::size_t> out;
    for (const auto& s : steps) out.insert(out.end(), s.actions.begin(), s.actions.end());
    return out;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.actions.size();
    return n;
  }
};

enum class RecipeStatus { solved, unsolvable, budget_exceeded };

struct RecipePlanResult {
  RecipeStatus status = RecipeStatus::solved;
  /// Steps solved so far; complete when `status == solved`.
  FullPlan plan;
  /// 1-based step that failed, 0 when solved.
  std::size_t failed_step = 0;
  std::string report;
  std::size_t expansions = 0;

  bool solved() const noexcept { return status == RecipeStatus::solved; }
};

/// Marks as recipe actions the last action of the step that makes each call
/// literal true; everything else was inserted by the planner.
inline std::vector<bool> complemented_flags(const GroundedTask& task, const StepGoals& goals,
                                            const std::vector<std::size_t>& actions) {
  std::vector<bool> flags(actions.size(), true);
  for (const auto& lit : goals.literals) {
    if (lit.origin != Origin::call) continue;
    const auto fact = task.find(lit.atom);
    if (!fact) continue;
    for (std::size_t k = actions.size(); k-- > 0;) {
      const auto& a = task.actions[actions[k]];
      const auto& effect = lit.positive ? a.add : a.del;
      if (std::binary_search(effect.begin(), effect.end(), *fact)) {
        flags[k] = false;
        break;
      }
    }
  }
  return flags;
}

inline std::string format_goal(const StepGoals& goals) {
  std::string out;
  for (const auto& l : goals.literals) {
    if (!out.empty()) out += " ";
    out += l.positive ? pddl::to_string(l.atom) : "(not " + pddl::to_string(l.atom) + ")";
  }
  return out;
}

/// Sequential planning: step k is planned from the final state of step k-1.
/// Stops at the first step that cannot be solved.
inline RecipePlanResult plan_recipe(const GroundedTask& task, const CompiledGoals& goals,
                                    const planner::PlannerOptions& options = {}) {
  RecipePlanResult result;
  FactSet state = task.init;
  for (std::size_t k = 0; k < goals.steps.size(); ++k) {
    const auto& step_goals = goals.steps[k];
    std::optional<planner::GoalFacts> goal;
    try {
      goal = planner::resolve_goal(task, step_goals.goal());
    } catch (const ModelError& e) {
      result.status = RecipeStatus::unsolvable;
      result.failed_step = k + 1;
      result.report = "step " + std::to_string(k + 1) + ": " + e.what();
      return result;
    }
    const auto r = planner::plan(task, state, *goal, options);
    result.expansions += r.expansions;
    if (!r.solved()) {
      result.status = r.status == planner::PlanStatus::budget_exceeded ? RecipeStatus::budget_exceeded
                                                                       : RecipeStatus::unsolvable;
      result.failed_step = k + 1;
      result.report = "step " + std::to_string(k + 1) + " " +
                      (r.status == planner::PlanStatus::budget_exceeded ? "exceeded the node budget"
                                                                        : "is unsolvable") +
                      "; goal: " + format_goal(step_goals);
      return result;
    }
    StepPlan sp;
    sp.start = state;
    sp.actions = r.plan.actions;
    sp.complemented = complemented_flags(task, step_goals, sp.actions);
    sp.final_state = r.plan.final_state;
    state = sp.final_state;
    result.plan.steps.push_back(std::move(sp));
  }
  return result;
}

inline std::string state_digest(const GroundedTask& task, const FactSet& state) {
  sim::StateDigest d;
  state.for_each([&](pddl::FactId f) { d.add(task.fact_name(f)); });
  return d.hex();
}

/// ```
/// step 1 start=<digest>
///   c (hold measuring-cup arm1 sink) <chain>
///   r (transfer water measuring-cup pot arm1 stove) <chain>
/// end 1 final=<digest>
/// ```
/// `c` marks complemented actions, `r` recipe actions. The chain starts at
/// the digest of the initial state and links every action to its successor
/// state, so any edit to the action list is detectable.
inline std::string print_plan(const GroundedTask& task, const FullPlan& plan) {
  std::string out;
  std::string chain = plan.steps.empty() ? state_digest(task, task.init)
                                         : state_digest(task, plan.steps.front().start);
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto& sp = plan.steps[k];
    out += "step " + std::to_string(k + 1) + " start=" + state_digest(task, sp.start) + "\n";
    FactSet s = sp.start;
    for (std::size_t i = 0; i < sp.actions.size(); ++i) {
      const auto& a = task.actions[sp.actions[i]];
      s = planner::successor(s, a);
      chain = sim::chain_next(chain, a.name(), state_digest(task, s));
      out += std::string("  ") + (sp.complemented[i] ? "c " : "r ") + a.name() + " " + chain + "\n";
    }
    out += "end " + std::to_string(k + 1) + " final=" + state_digest(task, sp.final_state) + "\n";
  }
  return out;
}

/// Textual content of a plan file, without any grounded task.
struct PlanFileAction {
  std::string name;
  bool complemented = false;
  std::string chain;
  int line = 0;
};

struct PlanFileStep {
  std::string start_digest;
  std::string final_digest;
  std::vector<PlanFileAction> actions;
};

struct PlanFile {
  std::vector<PlanFileStep> steps;

  std::vector<std::string> action_names() const {
    std::vector<std::string> out;
    for (const auto& s : steps) {
      for (const auto& a : s.actions) out.push_back(a.name);
    }
    return out;
  }
};

inline PlanFile parse_plan_file(std::string_view text) {
  PlanFile out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool open = false;
  while (std::getline(in, line)) {
    ++line_no;
    const SourcePos pos{line_no, 1};
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto expect_number = [&](std::size_t want) {
      std::size_t n = 0;
      if (!(ls >> n) || n != want) throw ParseError("expected step number " + std::to_string(want), pos);
    };
    auto keyed = [&](const std::string& key) {
      std::string field;
      ls >> field;
      if (field.rfind(key + "=", 0) != 0) throw ParseError("expected '" + key + "=<digest>'", pos);
      auto value = field.substr(key.size() + 1);
      if (!sim::parse_hex64(value)) throw ParseError("malformed digest '" + value + "'", pos);
      return value;
    };
    if (head == "step") {
      if (open) throw ParseError("'step' before 'end' of the previous step", pos);
      expect_number(out.steps.size() + 1);
      out.steps.emplace_back();
      out.steps.back().start_digest = keyed("start");
      open = true;
    } else if (head == "end") {
      if (!open) throw ParseError("'end' without 'step'", pos);
      expect_number(out.steps.size());
      out.steps.back().final_digest = keyed("final");
      open = false;
    } else if (head == "c" || head == "r") {
      if (!open) throw ParseError("action outside a step", pos);
      const auto open_paren = line.find('(');
      const auto close_paren = line.find(')');
      if (open_paren == std::string::npos || close_paren == std::string::npos || close_paren < open_paren) {
        throw ParseError("expected an action such as (hold egg arm1 kitchen)", pos);
      }
      PlanFileAction a;
      a.name = line.substr(open_paren, close_paren - open_paren + 1);
      a.complemented = head == "c";
      a.line = line_no;
      std::istringstream tail(line.substr(close_paren + 1));
      tail >> a.chain;
      if (!sim::parse_hex64(a.chain)) throw ParseError("missing or malformed chain digest", pos);
      out.steps.back().actions.push_back(std::move(a));
    } else {
      throw ParseError("unexpected '" + head + "'", pos);
    }
  }
  if (open) throw ParseError("plan file ends inside a step", SourcePos{line_no, 1});
  return out;
}

}  // namespace cookplan::goals
