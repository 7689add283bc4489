#pragma once

#include <sstream>
#include <string>

#include "cookplan/pddl/model.hpp"

namespace cookplan::pddl {

namespace detail {

inline std::string typed_list(const std::vector<TypedName>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ' ';
    out += names[i].name + " - " + names[i].type;
  }
  return out;
}

inline std::string condition_text(const Condition& cond) {
  if (const auto* lit = std::get_if<Literal>(&cond)) return to_string(*lit);
  if (const auto* eq = std::get_if<Equality>(&cond)) {
    const std::string inner = "(= " + eq->lhs + " " + eq->rhs + ")";
    return eq->equal ? inner : "(not " + inner + ")";
  }
  const auto& fa = std::get<ForallNegative>(cond);
  std::string body;
  if (fa.atoms.size() == 1) {
    body = "(not " + to_string(fa.atoms.front()) + ")";
  } else {
    body = "(and";
    for (const auto& atom : fa.atoms) body += " (not " + to_string(atom) + ")";
    body += ")";
  }
  return "(forall (" + typed_list(fa.vars) + ") " + body + ")";
}

}  // namespace detail

/// Canonical rendering: one declaration per line, two-space indentation.
/// `parse_domain(print_domain(d)) == d` for every valid model.
inline std::string print_domain(const DomainModel& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  out << "  (:types";
  // A bare name before `- parent` would take that parent, so roots go last.
  for (const auto& t : d.types) {
    if (t.parent) out << "\n    " << t.name << " - " << *t.parent;
  }
  for (const auto& t : d.types) {
    if (!t.parent) out << "\n    " << t.name;
  }
  out << ")\n";
  if (!d.constants.empty()) {
    out << "  (:constants";
    for (const auto& c : d.constants) out << "\n    " << c.name << " - " << c.type;
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto& p : d.predicates) {
    out << "\n    (" << p.name;
    if (!p.params.empty()) out << ' ' << detail::typed_list(p.params);
    out << ")";
  }
  out << ")\n";
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n";
    out << "    :parameters (" << detail::typed_list(a.params) << ")\n";
    out << "    :precondition (and";
    for (const auto& c : a.precondition) out << "\n      " << detail::condition_text(c);
    out << ")\n";
    out << "    :effect (and";
    for (const auto& l : a.effect) out << "\n      " << to_string(l);
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

inline std::string print_problem(const ProblemModel& p) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n";
  out << "  (:domain " << p.domain << ")\n";
  out << "  (:objects";
  for (const auto& o : p.objects) out << "\n    " << o.name << " - " << o.type;
  out << ")\n";
  out << "  (:init";
  for (const auto& a : p.init) out << "\n    " << to_string(a);
  out << ")\n";
  out << "  (:goal (and";
  for (const auto& a : p.goal.positive) out << "\n    " << to_string(a);
  for (const auto& a : p.goal.negative) out << "\n    (not " << to_string(a) << ")";
  out << ")))\n";
  return out.str();
}

}  // namespace cookplan::pddl
