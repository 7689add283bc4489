#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/pddl/fact_set.hpp"
#include "cookplan/pddl/model.hpp"

namespace cookplan::pddl {

using FactId = std::uint32_t;

struct GroundLiteral {
  FactId fact = 0;
  bool positive = true;

  friend bool operator==(const GroundLiteral&, const GroundLiteral&) = default;
};

struct GroundAction {
  std::size_t schema = 0;
  std::string schema_name;
  std::vector<std::string> args;
  /// Precondition literals in schema order (forall clauses expanded in place).
  std::vector<GroundLiteral> precondition;
  /// Sorted, duplicate-free views of the precondition and effects.
  std::vector<FactId> pre_pos;
  std::vector<FactId> pre_neg;
  std::vector<FactId> add;
  std::vector<FactId> del;

  /// `(hold egg arm1 kitchen)`
  std::string name() const {
    std::string out = "(" + schema_name;
    for (const auto& a : args) out += " " + a;
    return out + ")";
  }
};

/// Propositional task. Facts and actions are ordered lexicographically by
/// their token sequence, so indices double as the deterministic tie-break key.
struct GroundedTask {
  std::vector<Atom> facts;
  std::vector<GroundAction> actions;
  FactSet init;

  std::optional<FactId> find(const Atom& atom) const {
    auto it = index_.find(to_string(atom));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  FactId require(const Atom& atom) const {
    auto id = find(atom);
    if (!id) throw ModelError("atom " + to_string(atom) + " is not in the grounded fact universe");
    return *id;
  }

  std::optional<std::size_t> find_action(const std::string& name) const {
    auto it = action_index_.find(name);
    if (it == action_index_.end()) return std::nullopt;
    return it->second;
  }

  std::string fact_name(FactId id) const { return to_string(facts[id]); }

  FactSet make_state(const std::vector<Atom>& atoms) const {
    FactSet s(facts.size());
    for (const auto& a : atoms) s.set(require(a));
    return s;
  }

  std::vector<Atom> atoms_of(const FactSet& s) const {
    std::vector<Atom> out;
    s.for_each([&](FactId id) { out.push_back(facts[id]); });
    return out;
  }

  void build_indices() {
    index_.clear();
    action_index_.clear();
    for (FactId i = 0; i < facts.size(); ++i) index_.emplace(to_string(facts[i]), i);
    for (std::size_t i = 0; i < actions.size(); ++i) action_index_.emplace(actions[i].name(), i);
  }

 private:
  std::unordered_map<std::string, FactId> index_;
  std::unordered_map<std::string, std::size_t> action_index_;
};

namespace detail {

inline std::vector<std::string> token_key(const std::string& head,
                                          const std::vector<std::string>& args) {
  std::vector<std::string> key;
  key.reserve(args.size() + 1);
  key.push_back(head);
  key.insert(key.end(), args.begin(), args.end());
  return key;
}

class Grounder {
 public:
  Grounder(const DomainModel& d, const ProblemModel& p) : domain_(d), types_(d.types) {
    for (const auto& o : p.objects) {
      if (!types_.declared(o.type)) {
        throw ModelError("object '" + o.name + "' has undeclared type '" + o.type + "'");
      }
    }
    table_ = object_table(d, p);
  }

  GroundedTask run(const ProblemModel& p) {
    GroundedTask task;
    enumerate_facts(task);
    task.build_indices();
    for (std::size_t s = 0; s < domain_.actions.size(); ++s) ground_schema(task, s);
    std::sort(task.actions.begin(), task.actions.end(),
              [](const GroundAction& a, const GroundAction& b) {
                return token_key(a.schema_name, a.args) < token_key(b.schema_name, b.args);
              });
    task.build_indices();
    task.init = FactSet(task.facts.size());
    for (const auto& atom : p.init) {
      auto id = task.find(atom);
      if (!id) throw ModelError("init atom " + to_string(atom) + " is not type-consistent");
      task.init.set(*id);
    }
    return task;
  }

 private:
  std::vector<std::string> objects_of(const std::string& type) const {
    std::vector<std::string> out;
    for (const auto& [name, t] : table_) {
      if (types_.is_subtype(t, type)) out.push_back(name);
    }
    return out;  // std::map keeps names sorted
  }

  void enumerate_facts(GroundedTask& task) const {
    std::vector<std::pair<std::vector<std::string>, Atom>> keyed;
    for (const auto& pred : domain_.predicates) {
      std::vector<std::vector<std::string>> domains;
      for (const auto& param : pred.params) domains.push_back(objects_of(param.type));
      std::vector<std::string> args(pred.params.size());
      auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == args.size()) {
          keyed.emplace_back(token_key(pred.name, args), Atom{pred.name, args});
          return;
        }
        for (const auto& obj : domains[i]) {
          args[i] = obj;
          self(self, i + 1);
        }
      };
      rec(rec, 0);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    task.facts.reserve(keyed.size());
    for (auto& [key, atom] : keyed) task.facts.push_back(std::move(atom));
  }

  std::string resolve(const std::string& term, const std::map<std::string, std::string>& binding) const {
    if (is_variable(term)) return binding.at(term);
    return term;
  }

  Atom instantiate(const Atom& atom, const std::map<std::string, std::string>& binding) const {
    Atom out{atom.predicate, {}};
    out.args.reserve(atom.args.size());
    for (const auto& t : atom.args) out.args.push_back(resolve(t, binding));
    return out;
  }

  /// Equality constraints whose terms are all bound by the first `bound` params.
  bool equalities_hold(const ActionSchema& schema,
                       const std::map<std::string, std::string>& binding) const {
    for (const auto& cond : schema.precondition) {
      const auto* eq = std::get_if<Equality>(&cond);
      if (eq == nullptr) continue;
      const bool lhs_ready = !is_variable(eq->lhs) || binding.contains(eq->lhs);
      const bool rhs_ready = !is_variable(eq->rhs) || binding.contains(eq->rhs);
      if (!lhs_ready || !rhs_ready) continue;
      const bool same = resolve(eq->lhs, binding) == resolve(eq->rhs, binding);
      if (same != eq->equal) return false;
    }
    return true;
  }

  void ground_schema(GroundedTask& task, std::size_t index) const {
    const ActionSchema& schema = domain_.actions[index];
    std::vector<std::vector<std::string>> domains;
    for (const auto& param : schema.params) domains.push_back(objects_of(param.type));
    std::map<std::string, std::string> binding;
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (!equalities_hold(schema, binding)) return;
      if (i == schema.params.size()) {
        task.actions.push_back(make_action(task, index, binding));
        return;
      }
      for (const auto& obj : domains[i]) {
        binding[schema.params[i].name] = obj;
        self(self, i + 1);
      }
      binding.erase(schema.params[i].name);
    };
    rec(rec, 0);
  }

  GroundAction make_action(const GroundedTask& task, std::size_t index,
                           const std::map<std::string, std::string>& binding) const {
    const ActionSchema& schema = domain_.actions[index];
    GroundAction ga;
    ga.schema = index;
    ga.schema_name = schema.name;
    for (const auto& param : schema.params) ga.args.push_back(binding.at(param.name));

    for (const auto& cond : schema.precondition) {
      if (const auto* lit = std::get_if<Literal>(&cond)) {
        ga.precondition.push_back({task.require(instantiate(lit->atom, binding)), lit->positive});
      } else if (const auto* fa = std::get_if<ForallNegative>(&cond)) {
        expand_forall(task, *fa, binding, ga.precondition);
      }
    }
    for (const auto& lit : ga.precondition) (lit.positive ? ga.pre_pos : ga.pre_neg).push_back(lit.fact);
    for (const auto& lit : schema.effect) {
      (lit.positive ? ga.add : ga.del).push_back(task.require(instantiate(lit.atom, binding)));
    }
    for (auto* v : {&ga.pre_pos, &ga.pre_neg, &ga.add, &ga.del}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    // (s \ del) U add: an atom both added and deleted ends up true.
    std::vector<FactId> del;
    std::set_difference(ga.del.begin(), ga.del.end(), ga.add.begin(), ga.add.end(),
                        std::back_inserter(del));
    ga.del = std::move(del);
    return ga;
  }

  void expand_forall(const GroundedTask& task, const ForallNegative& fa,
                     std::map<std::string, std::string> binding,
                     std::vector<GroundLiteral>& out) const {
    std::vector<std::vector<std::string>> domains;
    for (const auto& v : fa.vars) domains.push_back(objects_of(v.type));
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == fa.vars.size()) {
        for (const auto& atom : fa.atoms) {
          out.push_back({task.require(instantiate(atom, binding)), false});
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

  const DomainModel& domain_;
  TypeHierarchy types_;
  std::map<std::string, std::string> table_;
};

}  // namespace detail

/// Exhaustive typed grounding. Inequality constraints are applied while
/// binding, forall clauses become one negative literal per object.
inline GroundedTask ground(const DomainModel& d, const ProblemModel& p) {
  return detail::Grounder(d, p).run(p);
}

/// Structured summary: total fact/action counts and per-schema action counts.
inline std::string grounding_report(const DomainModel& d, const GroundedTask& task) {
  std::map<std::string, std::size_t> per_schema;
  for (const auto& a : d.actions) per_schema[a.name] = 0;
  for (const auto& a : task.actions) ++per_schema[a.schema_name];
  std::ostringstream out;
  out << "facts " << task.facts.size() << "\n";
  out << "actions " << task.actions.size() << "\n";
  out << "init-facts " << task.init.count() << "\n";
  for (const auto& a : d.actions) out << "schema " << a.name << " " << per_schema[a.name] << "\n";
  return out.str();
}

}  // namespace cookplan::pddl
