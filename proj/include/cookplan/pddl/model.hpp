#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cookplan/error.hpp"

namespace cookplan::pddl {

struct TypeDecl {
  std::string name;
  std::optional<std::string> parent;

  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

/// `name - type`; used for parameters (name starts with '?'), constants and objects.
struct TypedName {
  std::string name;
  std::string type;

  friend bool operator==(const TypedName&, const TypedName&) = default;
};

/// Predicate applied to terms. Terms are variables (`?x`) or object names.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

inline bool is_variable(const std::string& term) { return !term.empty() && term[0] == '?'; }

/// `(pred a b)`
inline std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& arg : atom.args) out += " " + arg;
  out += ")";
  return out;
}

struct Literal {
  Atom atom;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
};

inline std::string to_string(const Literal& lit) {
  return lit.positive ? to_string(lit.atom) : "(not " + to_string(lit.atom) + ")";
}

/// `(= a b)` or `(not (= a b))`.
struct Equality {
  std::string lhs;
  std::string rhs;
  bool equal = false;

  friend bool operator==(const Equality&, const Equality&) = default;
};

/// `(forall (?v - vessel) (not (p ?v)))`, possibly with several negated atoms.
struct ForallNegative {
  std::vector<TypedName> vars;
  std::vector<Atom> atoms;

  friend bool operator==(const ForallNegative&, const ForallNegative&) = default;
};

using Condition = std::variant<Literal, Equality, ForallNegative>;

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;

  friend bool operator==(const PredicateSchema&, const PredicateSchema&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Condition> precondition;
  /// Positive literals are adds, negative literals are deletes.
  std::vector<Literal> effect;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct DomainModel {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;

  friend bool operator==(const DomainModel&, const DomainModel&) = default;

  const ActionSchema* find_action(const std::string& action) const {
    auto it = std::find_if(actions.begin(), actions.end(),
                           [&](const ActionSchema& a) { return a.name == action; });
    return it == actions.end() ? nullptr : &*it;
  }

  const PredicateSchema* find_predicate(const std::string& predicate) const {
    auto it = std::find_if(predicates.begin(), predicates.end(),
                           [&](const PredicateSchema& p) { return p.name == predicate; });
    return it == predicates.end() ? nullptr : &*it;
  }
};

/// Conjunction of ground literals; absent atoms are false (closed world).
struct GoalLiterals {
  std::vector<Atom> positive;
  std::vector<Atom> negative;

  friend bool operator==(const GoalLiterals&, const GoalLiterals&) = default;

  bool empty() const { return positive.empty() && negative.empty(); }
};

struct ProblemModel {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  GoalLiterals goal;

  friend bool operator==(const ProblemModel&, const ProblemModel&) = default;
};

inline const std::vector<std::string>& supported_requirements() {
  static const std::vector<std::string> kSupported = {
      ":strips", ":typing", ":negative-preconditions", ":equality", ":universal-preconditions"};
  return kSupported;
}

/// Type tree with subtype queries. Every declared type has at most one parent.
class TypeHierarchy {
 public:
  explicit TypeHierarchy(const std::vector<TypeDecl>& types) {
    for (const auto& t : types) {
      if (!parent_.emplace(t.name, t.parent.value_or("")).second) {
        throw ModelError("duplicate type '" + t.name + "'");
      }
    }
    for (const auto& t : types) {
      if (t.parent && !parent_.contains(*t.parent)) {
        throw ModelError("type '" + t.name + "' has undeclared parent '" + *t.parent + "'");
      }
    }
    for (const auto& t : types) {
      // Cycle check: walk up at most |types| links.
      std::string cur = t.name;
      for (std::size_t i = 0; i <= types.size(); ++i) {
        cur = parent_.at(cur);
        if (cur.empty()) break;
        if (i == types.size()) throw ModelError("type hierarchy cycle at '" + t.name + "'");
      }
    }
  }

  bool declared(const std::string& type) const { return parent_.contains(type); }

  bool is_subtype(std::string type, const std::string& ancestor) const {
    while (!type.empty()) {
      if (type == ancestor) return true;
      auto it = parent_.find(type);
      if (it == parent_.end()) return false;
      type = it->second;
    }
    return false;
  }

 private:
  std::map<std::string, std::string> parent_;
};

namespace detail {

inline void check_type(const TypeHierarchy& types, const std::string& type,
                       const std::string& where) {
  if (!types.declared(type)) throw ModelError(where + ": undeclared type '" + type + "'");
}

inline void check_atom(const DomainModel& d, const TypeHierarchy& types,
                       const std::map<std::string, std::string>& scope, const Atom& atom,
                       const std::string& where) {
  const PredicateSchema* pred = d.find_predicate(atom.predicate);
  if (pred == nullptr) {
    throw ModelError(where + ": undeclared predicate '" + atom.predicate + "'");
  }
  if (pred->params.size() != atom.args.size()) {
    throw ModelError(where + ": arity mismatch for '" + atom.predicate + "': expected " +
                     std::to_string(pred->params.size()) + ", got " +
                     std::to_string(atom.args.size()));
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    auto it = scope.find(atom.args[i]);
    if (it == scope.end()) {
      throw ModelError(where + ": unbound term '" + atom.args[i] + "' in " + to_string(atom));
    }
    if (!types.is_subtype(it->second, pred->params[i].type)) {
      throw ModelError(where + ": term '" + atom.args[i] + "' of type '" + it->second +
                       "' does not fit parameter " + std::to_string(i + 1) + " of '" +
                       atom.predicate + "' (" + pred->params[i].type + ")");
    }
  }
}

}  // namespace detail

/// Semantic checks shared by the parser and the kitchen builder.
inline void validate_domain(const DomainModel& d) {
  for (const auto& req : d.requirements) {
    const auto& ok = supported_requirements();
    if (std::find(ok.begin(), ok.end(), req) == ok.end()) {
      throw ModelError("unsupported requirement '" + req + "'");
    }
  }
  const TypeHierarchy types(d.types);

  std::map<std::string, std::string> constants;
  for (const auto& c : d.constants) {
    detail::check_type(types, c.type, "constant '" + c.name + "'");
    if (!constants.emplace(c.name, c.type).second) {
      throw ModelError("duplicate constant '" + c.name + "'");
    }
  }

  std::set<std::string> predicate_names;
  for (const auto& p : d.predicates) {
    if (!predicate_names.insert(p.name).second) {
      throw ModelError("duplicate predicate '" + p.name + "'");
    }
    for (const auto& param : p.params) {
      detail::check_type(types, param.type, "predicate '" + p.name + "'");
    }
  }

  std::set<std::string> action_names;
  for (const auto& a : d.actions) {
    const std::string where = "action '" + a.name + "'";
    if (!action_names.insert(a.name).second) throw ModelError("duplicate action name '" + a.name + "'");
    auto scope = constants;
    for (const auto& param : a.params) {
      if (!is_variable(param.name)) throw ModelError(where + ": parameter '" + param.name + "' must start with '?'");
      detail::check_type(types, param.type, where);
      if (!scope.emplace(param.name, param.type).second || constants.contains(param.name)) {
        throw ModelError(where + ": duplicate parameter '" + param.name + "'");
      }
    }
    for (const auto& cond : a.precondition) {
      if (const auto* lit = std::get_if<Literal>(&cond)) {
        detail::check_atom(d, types, scope, lit->atom, where);
      } else if (const auto* eq = std::get_if<Equality>(&cond)) {
        for (const auto* term : {&eq->lhs, &eq->rhs}) {
          if (!scope.contains(*term)) throw ModelError(where + ": unbound term '" + *term + "' in equality");
        }
      } else {
        const auto& fa = std::get<ForallNegative>(cond);
        auto inner = scope;
        for (const auto& v : fa.vars) {
          detail::check_type(types, v.type, where);
          inner[v.name] = v.type;
        }
        for (const auto& atom : fa.atoms) detail::check_atom(d, types, inner, atom, where);
      }
    }
    for (const auto& lit : a.effect) detail::check_atom(d, types, scope, lit.atom, where);
  }
}

/// Name -> type for the problem's objects plus the domain constants.
inline std::map<std::string, std::string> object_table(const DomainModel& d,
                                                       const ProblemModel& p) {
  std::map<std::string, std::string> table;
  for (const auto& c : d.constants) table.emplace(c.name, c.type);
  for (const auto& o : p.objects) {
    auto [it, inserted] = table.emplace(o.name, o.type);
    if (!inserted && it->second != o.type) {
      throw ModelError("object '" + o.name + "' declared with conflicting types '" + it->second +
                       "' and '" + o.type + "'");
    }
  }
  return table;
}

/// Checks that every object type is declared and that init and goal only use
/// declared predicates over declared objects.
inline void validate_problem(const DomainModel& d, const ProblemModel& p) {
  const TypeHierarchy types(d.types);
  for (const auto& o : p.objects) {
    detail::check_type(types, o.type, "object '" + o.name + "'");
  }
  const auto table = object_table(d, p);
  for (const auto& atom : p.init) detail::check_atom(d, types, table, atom, "init");
  for (const auto& atom : p.goal.positive) detail::check_atom(d, types, table, atom, "goal");
  for (const auto& atom : p.goal.negative) detail::check_atom(d, types, table, atom, "goal");
}

}  // namespace cookplan::pddl
