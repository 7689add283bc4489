#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/funcseq/funcseq.hpp"
#include "cookplan/kitchen/domain.hpp"
#include "cookplan/kitchen/scenario.hpp"
#include "cookplan/pddl/model.hpp"
#include "cookplan/pddl/sexpr.hpp"

namespace cookplan::goals {

using pddl::Atom;

/// Why a literal is part of a step goal.
enum class Origin { call, default_condition, end_condition };

inline std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::call: return "call";
    case Origin::default_condition: return "default";
    case Origin::end_condition: return "end";
  }
  return "?";
}

struct GoalLiteral {
  Atom atom;
  bool positive = true;
  Origin origin = Origin::call;

  friend bool operator==(const GoalLiteral&, const GoalLiteral&) = default;
};

struct StepGoals {
  std::vector<GoalLiteral> literals;

  pddl::GoalLiterals goal() const {
    pddl::GoalLiterals g;
    for (const auto& l : literals) (l.positive ? g.positive : g.negative).push_back(l.atom);
    return g;
  }

  friend bool operator==(const StepGoals&, const StepGoals&) = default;
};

struct CompiledGoals {
  std::vector<StepGoals> steps;

  friend bool operator==(const CompiledGoals&, const CompiledGoals&) = default;
};

/// "The robot has nothing": both arms free.
inline std::vector<GoalLiteral> default_condition() {
  std::vector<GoalLiteral> out;
  for (auto arm : kitchen::kArms) {
    out.push_back({Atom{"hand-free", {std::string(arm)}}, true, Origin::default_condition});
  }
  return out;
}

/// Tap closed and every stove off.
inline std::vector<GoalLiteral> end_condition() {
  std::vector<GoalLiteral> out;
  out.push_back({Atom{"tap-open", {}}, false, Origin::end_condition});
  for (auto v : kitchen::kStoveVessels) {
    out.push_back({Atom{"stove-on", {std::string(v)}}, false, Origin::end_condition});
  }
  return out;
}

/// Goal literals contributed by one call.
inline std::vector<GoalLiteral> call_literals(const funcseq::FunctionCall& call) {
  const auto& a = call.args;
  auto pos = [](std::string pred, std::vector<std::string> args) {
    return GoalLiteral{Atom{std::move(pred), std::move(args)}, true, Origin::call};
  };
  const auto* sig = funcseq::find_signature(call.name);
  if (sig == nullptr || sig->slots.size() != a.size()) {
    throw ModelError("cannot compile " + funcseq::to_string(call) + ": not a valid cooking function call");
  }
  if (call.name == "pour") return {pos("in", {a[0], a[1]})};
  if (call.name == "mix") return {pos("mixture-made", {a[2]}), pos("in", {a[2], a[3]})};
  if (call.name == "turn-on-stove") return {pos("stove-on", {a[0]})};
  if (call.name == "set-stove") return {pos("stove-level", {a[1], a[0]})};
  if (call.name == "turn-off-stove") {
    return {GoalLiteral{Atom{"stove-on", {a[0]}}, false, Origin::call}};
  }
  // stir, heat, cook, boil, stir-fry
  return {pos("ingredient-state", {a[0], a[1]})};
}

namespace detail {

inline void add_literal(StepGoals& goals, GoalLiteral lit, std::size_t step) {
  for (const auto& existing : goals.literals) {
    if (existing.atom != lit.atom) continue;
    if (existing.positive == lit.positive) return;
    throw ModelError("step " + std::to_string(step) + " requires " + pddl::to_string(lit.atom) +
                     " to be both true and false");
  }
  goals.literals.push_back(std::move(lit));
}

}  // namespace detail

/// Names a scenario makes available to goals: its objects, its states and
/// the domain constants.
inline std::set<std::string> scenario_symbols(const kitchen::ScenarioConfig& s) {
  std::set<std::string> out;
  const auto domain = kitchen::build_domain(s.ignition_level);
  for (const auto& c : domain.constants) out.insert(c.name);
  for (const auto& o : s.objects) out.insert(o.name);
  out.insert(s.states.begin(), s.states.end());
  out.insert(s.stove_levels.begin(), s.stove_levels.end());
  return out;
}

/// Union of the calls' goal literals plus the default condition.
/// `symbols`, when given, must contain every argument of every call.
/// `step_number` only labels errors.
inline StepGoals compile_step(const funcseq::Step& step, const std::set<std::string>* symbols = nullptr,
                              std::size_t step_number = 1) {
  StepGoals goals;
  for (const auto& call : step.calls) {
    if (symbols != nullptr) {
      for (const auto& arg : call.args) {
        if (!symbols->contains(arg)) {
          throw ModelError("step " + std::to_string(step_number) + ": " + funcseq::to_string(call) +
                           " refers to '" + arg + "', which is not in the scenario");
        }
      }
    }
    for (auto& lit : call_literals(call)) detail::add_literal(goals, std::move(lit), step_number);
  }
  for (auto& lit : default_condition()) detail::add_literal(goals, std::move(lit), step_number);
  return goals;
}

/// One goal set per step; the last one also carries the end condition.
inline CompiledGoals compile_sequence(const funcseq::FunctionSequence& fs,
                                      const std::set<std::string>* symbols = nullptr) {
  CompiledGoals out;
  for (std::size_t i = 0; i < fs.steps.size(); ++i) {
    out.steps.push_back(compile_step(fs.steps[i], symbols, i + 1));
  }
  if (!out.steps.empty()) {
    for (auto& lit : end_condition()) detail::add_literal(out.steps.back(), std::move(lit), out.steps.size());
  }
  return out;
}

/// ```
/// step 1
///   call + (in water pot)
///   default + (hand-free arm1)
///   end - (tap-open)
/// ```
inline std::string print_goals(const CompiledGoals& goals) {
  std::string out;
  for (std::size_t i = 0; i < goals.steps.size(); ++i) {
    out += "step " + std::to_string(i + 1) + "\n";
    for (const auto& l : goals.steps[i].literals) {
      out += "  " + std::string(to_string(l.origin)) + (l.positive ? " + " : " - ") +
             pddl::to_string(l.atom) + "\n";
    }
  }
  return out;
}

inline CompiledGoals parse_goals(std::string_view text) {
  CompiledGoals out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const SourcePos pos{line_no, 1};
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "step") {
      std::size_t n = 0;
      if (!(ls >> n) || n != out.steps.size() + 1) {
        throw ParseError("expected 'step " + std::to_string(out.steps.size() + 1) + "'", pos);
      }
      out.steps.emplace_back();
      continue;
    }
    if (out.steps.empty()) throw ParseError("goal literal before the first 'step' line", pos);
    GoalLiteral lit;
    if (head == "call") lit.origin = Origin::call;
    else if (head == "default") lit.origin = Origin::default_condition;
    else if (head == "end") lit.origin = Origin::end_condition;
    else throw ParseError("unknown goal origin '" + head + "'", pos);
    std::string sign;
    ls >> sign;
    if (sign != "+" && sign != "-") throw ParseError("expected '+' or '-'", pos);
    lit.positive = sign == "+";
    std::string rest;
    std::getline(ls, rest);
    const auto exprs = pddl::read_sexprs(rest);
    if (exprs.size() != 1 || exprs[0].kind != pddl::SExpr::Kind::list || exprs[0].items.empty()) {
      throw ParseError("expected one atom such as (in water pot)", pos);
    }
    for (const auto& item : exprs[0].items) {
      if (item.kind != pddl::SExpr::Kind::atom) throw ParseError("nested list in goal atom", pos);
    }
    lit.atom.predicate = exprs[0].items[0].atom;
    for (std::size_t i = 1; i < exprs[0].items.size(); ++i) lit.atom.args.push_back(exprs[0].items[i].atom);
    detail::add_literal(out.steps.back(), std::move(lit), out.steps.size());
  }
  return out;
}

}  // namespace cookplan::goals
