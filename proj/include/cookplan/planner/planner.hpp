#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/pddl/fact_set.hpp"
#include "cookplan/pddl/grounding.hpp"
#include "cookplan/pddl/model.hpp"
#include "cookplan/planner/lmcut.hpp"

namespace cookplan::planner {

using pddl::FactId;
using pddl::FactSet;
using pddl::GroundAction;
using pddl::GroundedTask;

/// Goal over fact indices of one grounded task.
struct GoalFacts {
  std::vector<FactId> positive;
  std::vector<FactId> negative;
};

inline GoalFacts resolve_goal(const GroundedTask& task, const pddl::GoalLiterals& goal) {
  GoalFacts out;
  for (const auto& a : goal.positive) out.positive.push_back(task.require(a));
  for (const auto& a : goal.negative) out.negative.push_back(task.require(a));
  for (auto* v : {&out.positive, &out.negative}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  for (auto f : out.positive) {
    if (std::binary_search(out.negative.begin(), out.negative.end(), f)) {
      throw ModelError("goal requires " + task.fact_name(f) + " to be both true and false");
    }
  }
  return out;
}

inline bool satisfies(const FactSet& state, const GoalFacts& goal) {
  for (auto f : goal.positive) {
    if (!state.test(f)) return false;
  }
  for (auto f : goal.negative) {
    if (state.test(f)) return false;
  }
  return true;
}

/// Raised by `apply` when the action is not applicable; names the first
/// failing precondition literal in schema order.
class PreconditionViolated : public Error {
 public:
  PreconditionViolated(std::string action, std::string atom, bool positive)
      : Error("precondition violated in " + action + ": " +
              (positive ? atom : "(not " + atom + ")")),
        action_(std::move(action)),
        atom_(std::move(atom)),
        positive_(positive) {}

  const std::string& action() const noexcept { return action_; }
  /// Atom text of the failing literal, e.g. `(stove-on pot)`.
  const std::string& atom() const noexcept { return atom_; }
  /// Whether the failing literal required the atom to be true.
  bool positive() const noexcept { return positive_; }

 private:
  std::string action_;
  std::string atom_;
  bool positive_;
};

inline bool applicable(const FactSet& state, const GroundAction& action) {
  for (auto f : action.pre_pos) {
    if (!state.test(f)) return false;
  }
  for (auto f : action.pre_neg) {
    if (state.test(f)) return false;
  }
  return true;
}

/// (s \ del) U add, without checking preconditions.
inline FactSet successor(const FactSet& state, const GroundAction& action) {
  FactSet next = state;
  for (auto f : action.del) next.reset(f);
  for (auto f : action.add) next.set(f);
  return next;
}

/// STRIPS application; throws PreconditionViolated when not applicable.
inline FactSet apply(const GroundedTask& task, const FactSet& state, const GroundAction& action) {
  for (const auto& lit : action.precondition) {
    if (state.test(lit.fact) != lit.positive) {
      throw PreconditionViolated(action.name(), task.fact_name(lit.fact), lit.positive);
    }
  }
  return successor(state, action);
}

struct Plan {
  /// Indices into GroundedTask::actions.
  std::vector<std::size_t> actions;
  FactSet final_state;
};

enum class PlanStatus { solved, unsolvable, budget_exceeded };

struct PlanResult {
  PlanStatus status = PlanStatus::unsolvable;
  Plan plan;
  std::size_t expansions = 0;

  bool solved() const noexcept { return status == PlanStatus::solved; }
};

struct PlannerOptions {
  /// Maximum number of node expansions before giving up.
  std::size_t node_budget = 5'000'000;
};

namespace detail {

/// One planning query. Actions that can never fire from `start` (relaxed
/// reachability) or can never contribute to the goal (backward relevance
/// over positive and negative conditions) are dropped first; neither pruning
/// removes any minimum-length plan, so the tie-break result is unchanged.
class Search {
 public:
  Search(const GroundedTask& task, const FactSet& start, const GoalFacts& goal,
         const PlannerOptions& options)
      : task_(task), start_(start), goal_(goal), options_(options) {}

  PlanResult run() {
    PlanResult result;
    if (satisfies(start_, goal_)) {
      result.status = PlanStatus::solved;
      result.plan.final_state = start_;
      return result;
    }
    if (!select_actions()) return result;
    build_heuristic();

    auto h0 = heuristic(start_);
    if (!h0) return result;
    int bound = *h0;
    while (true) {
      ++iteration_;
      next_bound_ = LmCut::kInfinity;
      path_.clear();
      const Outcome outcome = dfs(start_, 0, bound);
      result.expansions = expansions_;
      if (outcome == Outcome::found) {
        result.status = PlanStatus::solved;
        result.plan.actions = path_;
        result.plan.final_state = goal_state_;
        return result;
      }
      if (outcome == Outcome::budget) {
        result.status = PlanStatus::budget_exceeded;
        return result;
      }
      if (next_bound_ >= LmCut::kInfinity) return result;  // exhausted: unsolvable
      bound = next_bound_;
    }
  }

 private:
  enum class Outcome { found, failed, budget };

  struct Entry {
    std::optional<int> h;
    int failed_depth = 0;
    std::uint32_t failed_iteration = 0;
  };

  bool select_actions() {
    const std::size_t n = task_.facts.size();
    // Forward relaxed reachability on positive preconditions.
    std::vector<char> reached(n, 0);
    std::vector<int> unsat(task_.actions.size());
    std::vector<std::vector<std::uint32_t>> pre_of(n);
    std::vector<FactId> queue;
    std::vector<char> reachable_action(task_.actions.size(), 0);
    for (std::uint32_t a = 0; a < task_.actions.size(); ++a) {
      unsat[a] = static_cast<int>(task_.actions[a].pre_pos.size());
      for (auto f : task_.actions[a].pre_pos) pre_of[f].push_back(a);
    }
    auto fire = [&](std::uint32_t a) {
      reachable_action[a] = 1;
      for (auto f : task_.actions[a].add) {
        if (!reached[f]) {
          reached[f] = 1;
          queue.push_back(f);
        }
      }
    };
    start_.for_each([&](FactId f) {
      reached[f] = 1;
      queue.push_back(f);
    });
    for (std::uint32_t a = 0; a < task_.actions.size(); ++a) {
      if (unsat[a] == 0) fire(a);
    }
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (auto a : pre_of[queue[i]]) {
        if (--unsat[a] == 0) fire(a);
      }
    }
    for (auto f : goal_.positive) {
      if (!reached[f]) return false;
    }

    // Backward relevance: R+ facts must become true, R- facts must become false.
    std::vector<std::vector<std::uint32_t>> adders(n), deleters(n);
    for (std::uint32_t a = 0; a < task_.actions.size(); ++a) {
      if (!reachable_action[a]) continue;
      for (auto f : task_.actions[a].add) adders[f].push_back(a);
      for (auto f : task_.actions[a].del) deleters[f].push_back(a);
    }
    relevant_pos_.assign(n, 0);
    relevant_neg_.assign(n, 0);
    std::vector<char> relevant(task_.actions.size(), 0);
    std::vector<std::pair<FactId, bool>> work;
    auto mark = [&](FactId f, bool positive) {
      auto& flags = positive ? relevant_pos_ : relevant_neg_;
      if (!flags[f]) {
        flags[f] = 1;
        work.emplace_back(f, positive);
      }
    };
    for (auto f : goal_.positive) mark(f, true);
    for (auto f : goal_.negative) mark(f, false);
    while (!work.empty()) {
      const auto [f, positive] = work.back();
      work.pop_back();
      for (auto a : positive ? adders[f] : deleters[f]) {
        if (relevant[a]) continue;
        relevant[a] = 1;
        for (auto p : task_.actions[a].pre_pos) mark(p, true);
        for (auto p : task_.actions[a].pre_neg) mark(p, false);
      }
    }
    for (std::uint32_t a = 0; a < task_.actions.size(); ++a) {
      if (relevant[a]) actions_.push_back(a);
    }
    return true;
  }

  void build_heuristic() {
    const std::size_t n = task_.facts.size();
    relaxed_pos_.assign(n, UINT32_MAX);
    relaxed_neg_.assign(n, UINT32_MAX);
    std::uint32_t next = 0;
    for (FactId f = 0; f < n; ++f) {
      if (relevant_pos_[f]) {
        relaxed_pos_[f] = next++;
        tracked_pos_.push_back(f);
      }
      if (relevant_neg_[f]) {
        relaxed_neg_[f] = next++;
        tracked_neg_.push_back(f);
      }
    }
    std::vector<std::vector<std::uint32_t>> pre, eff;
    for (auto a : actions_) {
      const auto& act = task_.actions[a];
      std::vector<std::uint32_t> p, e;
      for (auto f : act.pre_pos) p.push_back(relaxed_pos_[f]);
      for (auto f : act.pre_neg) p.push_back(relaxed_neg_[f]);
      for (auto f : act.add) {
        if (relaxed_pos_[f] != UINT32_MAX) e.push_back(relaxed_pos_[f]);
      }
      for (auto f : act.del) {
        if (relaxed_neg_[f] != UINT32_MAX) e.push_back(relaxed_neg_[f]);
      }
      std::sort(p.begin(), p.end());
      p.erase(std::unique(p.begin(), p.end()), p.end());
      pre.push_back(std::move(p));
      eff.push_back(std::move(e));
    }
    std::vector<std::uint32_t> goal;
    for (auto f : goal_.positive) goal.push_back(relaxed_pos_[f]);
    for (auto f : goal_.negative) goal.push_back(relaxed_neg_[f]);
    lmcut_.emplace(next, std::move(pre), std::move(eff), std::move(goal));
  }

  std::optional<int> heuristic(const FactSet& state) {
    scratch_.clear();
    for (auto f : tracked_pos_) {
      if (state.test(f)) scratch_.push_back(relaxed_pos_[f]);
    }
    for (auto f : tracked_neg_) {
      if (!state.test(f)) scratch_.push_back(relaxed_neg_[f]);
    }
    return (*lmcut_)(scratch_);
  }

  Outcome dfs(const FactSet& state, int depth, int bound) {
    if (satisfies(state, goal_)) {
      goal_state_ = state;
      return Outcome::found;
    }
    Entry& entry = memo_[state];
    if (entry.failed_iteration == iteration_ && entry.failed_depth <= depth) {
      return Outcome::failed;
    }
    if (!entry.h) {
      entry.h = heuristic(state);
      if (!entry.h) entry.h = LmCut::kInfinity;
    }
    const int h = *entry.h;
    if (h >= LmCut::kInfinity) return Outcome::failed;
    if (depth + h > bound) {
      next_bound_ = std::min(next_bound_, depth + h);
      return Outcome::failed;
    }
    if (++expansions_ > options_.node_budget) return Outcome::budget;
    for (auto a : actions_) {
      const auto& act = task_.actions[a];
      if (!applicable(state, act)) continue;
      path_.push_back(a);
      const Outcome child = dfs(successor(state, act), depth + 1, bound);
      if (child != Outcome::failed) return child;
      path_.pop_back();
    }
    // `entry` may dangle after recursive inserts; look it up again.
    Entry& done = memo_[state];
    done.failed_iteration = iteration_;
    done.failed_depth = depth;
    return Outcome::failed;
  }

  const GroundedTask& task_;
  const FactSet& start_;
  const GoalFacts& goal_;
  PlannerOptions options_;

  std::vector<std::uint32_t> actions_;
  std::vector<char> relevant_pos_;
  std::vector<char> relevant_neg_;
  std::vector<std::uint32_t> relaxed_pos_;
  std::vector<std::uint32_t> relaxed_neg_;
  std::vector<FactId> tracked_pos_;
  std::vector<FactId> tracked_neg_;
  std::optional<LmCut> lmcut_;
  std::vector<std::uint32_t> scratch_;

  std::unordered_map<FactSet, Entry, pddl::FactSetHash> memo_;
  std::uint32_t iteration_ = 0;
  int next_bound_ = LmCut::kInfinity;
  std::size_t expansions_ = 0;
  std::vector<std::size_t> path_;
  FactSet goal_state_;
};

}  // namespace detail

/// Minimum-length plan from `start` to `goal`. Among all minimum-length plans
/// the one whose action-name sequence is lexicographically smallest is
/// returned, so identical queries give identical plans.
///
/// Iterative deepening over an LM-cut bound; children are visited in action
/// order and a transposition table records subtrees that failed at a given
/// depth, which never prunes the first plan found.
inline PlanResult plan(const GroundedTask& task, const FactSet& start, const GoalFacts& goal,
                       const PlannerOptions& options = {}) {
  return detail::Search(task, start, goal, options).run();
}

inline std::vector<std::string> action_names(const GroundedTask& task, const Plan& plan) {
  std::vector<std::string> out;
  out.reserve(plan.actions.size());
  for (auto a : plan.actions) out.push_back(task.actions[a].name());
  return out;
}

/// One `(action arg ...)` per line.
inline std::string format_plan(const GroundedTask& task, const Plan& plan) {
  std::string out;
  for (const auto& name : action_names(task, plan)) out += name + "\n";
  return out;
}

}  // namespace cookplan::planner
