#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/goals/compiler.hpp"
#include "cookplan/goals/recipe_plan.hpp"
#include "cookplan/pddl/model.hpp"
#include "cookplan/sim/digest.hpp"

namespace cookplan::sim {

/// World state as a set of atom texts such as `(in water pot)`.
using AtomSet = std::set<std::string>;

inline std::string digest(const AtomSet& state) { return digest_atoms(state); }

/// Outcome of replaying one action.
struct StepOutcome {
  /// Empty when the action name is well formed and all preconditions hold.
  std::vector<std::string> failures;
  bool known = true;  ///< false when the action cannot be instantiated at all
};

/// STRIPS replay written directly against the action schemas, sharing no
/// code with grounding or search.
class Replayer {
 public:
  Replayer(pddl::DomainModel domain, const pddl::ProblemModel& problem)
      : domain_(std::move(domain)), types_(domain_.types), objects_(pddl::object_table(domain_, problem)) {
    for (const auto& a : problem.init) init_.insert(pddl::to_string(a));
  }

  const AtomSet& initial() const noexcept { return init_; }

  /// Applies `action_text` (e.g. `(hold egg arm1 kitchen)`) to `state`.
  /// Effects are applied even when preconditions fail, so that replay can
  /// continue and report later problems too.
  StepOutcome apply(AtomSet& state, const std::string& action_text) const {
    StepOutcome out;
    std::vector<std::string> tokens;
    if (!tokenize(action_text, tokens)) {
      out.known = false;
      out.failures.push_back("malformed action '" + action_text + "'");
      return out;
    }
    const pddl::ActionSchema* schema = domain_.find_action(tokens[0]);
    if (schema == nullptr) {
      out.known = false;
      out.failures.push_back("unknown action '" + tokens[0] + "'");
      return out;
    }
    if (tokens.size() - 1 != schema->params.size()) {
      out.known = false;
      out.failures.push_back(tokens[0] + " takes " + std::to_string(schema->params.size()) +
                             " arguments, got " + std::to_string(tokens.size() - 1));
      return out;
    }
    std::map<std::string, std::string> binding;
    for (std::size_t i = 0; i < schema->params.size(); ++i) {
      const auto& param = schema->params[i];
      const auto& obj = tokens[i + 1];
      auto it = objects_.find(obj);
      if (it == objects_.end() || !types_.is_subtype(it->second, param.type)) {
        out.known = false;
        out.failures.push_back("'" + obj + "' is not a " + param.type + " in " + action_text);
        return out;
      }
      binding[param.name] = obj;
    }
    auto term = [&](const std::string& t) { return pddl::is_variable(t) ? binding.at(t) : t; };
    auto text = [&](const pddl::Atom& a) {
      std::string s = "(" + a.predicate;
      for (const auto& arg : a.args) s += " " + term(arg);
      return s + ")";
    };

    for (const auto& cond : schema->precondition) {
      if (const auto* lit = std::get_if<pddl::Literal>(&cond)) {
        const std::string atom = text(lit->atom);
        if (state.contains(atom) != lit->positive) {
          out.failures.push_back(lit->positive ? "requires " + atom : "requires (not " + atom + ")");
        }
      } else if (const auto* eq = std::get_if<pddl::Equality>(&cond)) {
        const bool same = term(eq->lhs) == term(eq->rhs);
        if (same != eq->equal) {
          out.failures.push_back("requires " + term(eq->lhs) + (eq->equal ? " = " : " != ") + term(eq->rhs));
        }
      } else if (const auto* fa = std::get_if<pddl::ForallNegative>(&cond)) {
        check_forall(*fa, binding, state, out.failures);
      }
    }

    std::vector<std::string> add, del;
    for (const auto& lit : schema->effect) (lit.positive ? add : del).push_back(text(lit.atom));
    for (const auto& a : del) state.erase(a);
    for (const auto& a : add) state.insert(a);
    return out;
  }

 private:
  static bool tokenize(const std::string& action_text, std::vector<std::string>& tokens) {
    if (action_text.size() < 3 || action_text.front() != '(' || action_text.back() != ')') return false;
    std::istringstream in(action_text.substr(1, action_text.size() - 2));
    std::string t;
    while (in >> t) tokens.push_back(t);
    return !tokens.empty();
  }

  void check_forall(const pddl::ForallNegative& fa, std::map<std::string, std::string> binding,
                    const AtomSet& state, std::vector<std::string>& failures) const {
    std::vector<std::vector<std::string>> domains;
    for (const auto& v : fa.vars) {
      std::vector<std::string> objs;
      for (const auto& [name, type] : objects_) {
        if (types_.is_subtype(type, v.type)) objs.push_back(name);
      }
      domains.push_back(std::move(objs));
    }
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == fa.vars.size()) {
        for (const auto& atom : fa.atoms) {
          std::string s = "(" + atom.predicate;
          for (const auto& arg : atom.args) s += " " + (pddl::is_variable(arg) ? binding.at(arg) : arg);
          s += ")";
          if (state.contains(s)) failures.push_back("requires (not " + s + ")");
        }
        return;
      }
      for (const auto& obj : domains[i]) {
        binding[fa.vars[i].name] = obj;
        self(self, i + 1);
      }
    };
    rec(rec, 0);
  }

  pddl::DomainModel domain_;
  pddl::TypeHierarchy types_;
  std::map<std::string, std::string> objects_;
  AtomSet init_;
};

struct Violation {
  /// precondition | unknown-action | goal | end-condition | chain | digest | structure
  std::string kind;
  std::size_t step = 0;  ///< 1-based, 0 for whole-plan problems
  int line = 0;          ///< plan file line, 0 when not tied to an action
  std::string message;
};

inline std::string to_string(const Violation& v) {
  std::string out = v.kind;
  if (v.step) out += " step " + std::to_string(v.step);
  if (v.line) out += " line " + std::to_string(v.line);
  return out + ": " + v.message;
}

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t actions_checked = 0;

  bool ok() const noexcept { return violations.empty(); }

  std::string text() const {
    std::string out;
    for (const auto& v : violations) out += to_string(v) + "\n";
    out += (ok() ? "valid" : "invalid") + std::string(" actions=") + std::to_string(actions_checked) +
           " violations=" + std::to_string(violations.size()) + "\n";
    return out;
  }
};

namespace detail {

inline std::string literal_text(const goals::GoalLiteral& l) {
  const auto atom = pddl::to_string(l.atom);
  return l.positive ? atom : "(not " + atom + ")";
}

inline bool holds(const AtomSet& state, const goals::GoalLiteral& l) {
  return state.contains(pddl::to_string(l.atom)) == l.positive;
}

}  // namespace detail

/// Replays `plan` from the replayer's initial state and checks every
/// precondition, the recorded digests and hash chain, each step goal at its
/// boundary, and the end condition after the last step.
inline ValidationReport validate(const Replayer& replayer, const goals::PlanFile& plan,
                                 const goals::CompiledGoals& goals) {
  ValidationReport report;
  auto add = [&](std::string kind, std::size_t step, int line, std::string msg) {
    report.violations.push_back({std::move(kind), step, line, std::move(msg)});
  };
  if (plan.steps.size() != goals.steps.size()) {
    add("structure", 0, 0,
        "plan has " + std::to_string(plan.steps.size()) + " steps, goals have " +
            std::to_string(goals.steps.size()));
  }
  AtomSet state = replayer.initial();
  std::string chain = digest(state);
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto& step = plan.steps[k];
    if (step.start_digest != digest(state)) {
      add("digest", k + 1, 0, "recorded start state does not match the replayed state");
    }
    for (const auto& action : step.actions) {
      ++report.actions_checked;
      const auto outcome = replayer.apply(state, action.name);
      for (const auto& f : outcome.failures) {
        add(outcome.known ? "precondition" : "unknown-action", k + 1, action.line, action.name + ": " + f);
      }
      const std::string expected = chain_next(chain, action.name, digest(state));
      if (expected != action.chain) {
        add("chain", k + 1, action.line, action.name + ": chain digest does not match the replayed history");
      }
      chain = action.chain;
    }
    if (step.final_digest != digest(state)) {
      add("digest", k + 1, 0, "recorded final state does not match the replayed state");
    }
    if (k < goals.steps.size()) {
      for (const auto& lit : goals.steps[k].literals) {
        if (!detail::holds(state, lit)) {
          add("goal", k + 1, 0, "goal " + detail::literal_text(lit) + " does not hold at the step boundary");
        }
      }
    }
  }
  for (const auto& lit : goals::end_condition()) {
    if (!detail::holds(state, lit)) {
      add("end-condition", plan.steps.size(), 0, detail::literal_text(lit) + " does not hold after the last step");
    }
  }
  for (const auto& lit : goals::default_condition()) {
    if (!detail::holds(state, lit)) {
      add("end-condition", plan.steps.size(), 0, detail::literal_text(lit) + " does not hold after the last step");
    }
  }
  return report;
}

}  // namespace cookplan::sim
