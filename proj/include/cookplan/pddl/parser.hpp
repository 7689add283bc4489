#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/pddl/model.hpp"
#include "cookplan/pddl/sexpr.hpp"

namespace cookplan::pddl {

namespace detail {

[[noreturn]] inline void fail(const SExpr& at, const std::string& message) {
  throw ParseError(message, at.pos);
}

inline const std::string& expect_atom(const SExpr& e, const std::string& what) {
  if (!e.is_atom()) fail(e, "expected " + what);
  return e.atom;
}

/// `a b - t1 c - t2`. Every name must end up typed; `owner` names the
/// enclosing construct in the error.
inline std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin,
                                               const std::string& owner) {
  std::vector<TypedName> out;
  std::vector<std::pair<std::string, SourcePos>> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& e = items[i];
    const std::string& tok = expect_atom(e, "name in typed list of " + owner);
    if (tok == "-") {
      if (pending.empty()) fail(e, owner + ": '-' without preceding names");
      if (i + 1 >= items.size()) fail(e, owner + ": missing type after '-'");
      const std::string& type = expect_atom(items[++i], "type name in " + owner);
      for (auto& [name, pos] : pending) out.push_back({name, type});
      pending.clear();
    } else {
      pending.emplace_back(tok, e.pos);
    }
  }
  if (!pending.empty()) {
    throw ParseError(owner + ": '" + pending.front().first + "' has no type",
                     pending.front().second);
  }
  return out;
}

inline Atom parse_atom(const SExpr& e) {
  if (!e.is_list() || e.items.empty()) fail(e, "expected atom");
  Atom atom;
  atom.predicate = expect_atom(e.items[0], "predicate name");
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    atom.args.push_back(expect_atom(e.items[i], "term"));
  }
  return atom;
}

inline std::vector<const SExpr*> conjuncts(const SExpr& e) {
  std::vector<const SExpr*> out;
  if (e.is_form("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(&e.items[i]);
  } else if (!(e.is_list() && e.items.empty())) {
    out.push_back(&e);
  }
  return out;
}

inline Condition parse_condition(const SExpr& e, const std::string& owner) {
  if (e.is_form("not")) {
    if (e.items.size() != 2) fail(e, owner + ": 'not' takes one argument");
    const SExpr& inner = e.items[1];
    if (inner.is_form("=")) {
      if (inner.items.size() != 3) fail(inner, owner + ": '=' takes two terms");
      return Equality{expect_atom(inner.items[1], "term"), expect_atom(inner.items[2], "term"),
                      false};
    }
    if (inner.is_form("and") || inner.is_form("or") || inner.is_form("not") ||
        inner.is_form("forall") || inner.is_form("exists")) {
      fail(inner, owner + ": only atoms may be negated");
    }
    return Literal{parse_atom(inner), false};
  }
  if (e.is_form("=")) {
    if (e.items.size() != 3) fail(e, owner + ": '=' takes two terms");
    return Equality{expect_atom(e.items[1], "term"), expect_atom(e.items[2], "term"), true};
  }
  if (e.is_form("forall")) {
    if (e.items.size() != 3 || !e.items[1].is_list()) {
      fail(e, owner + ": malformed forall");
    }
    ForallNegative fa;
    fa.vars = parse_typed_list(e.items[1].items, 0, owner + " forall");
    for (const SExpr* c : conjuncts(e.items[2])) {
      if (!c->is_form("not") || c->items.size() != 2 || c->items[1].is_form("=")) {
        fail(*c, owner + ": forall body must be a conjunction of negated atoms");
      }
      fa.atoms.push_back(parse_atom(c->items[1]));
    }
    return fa;
  }
  for (const char* unsupported : {"or", "imply", "exists", "when", "increase", "decrease"}) {
    if (e.is_form(unsupported)) {
      fail(e, owner + ": unsupported construct '" + std::string(unsupported) + "'");
    }
  }
  return Literal{parse_atom(e), true};
}

inline ActionSchema parse_action(const SExpr& e) {
  if (e.items.size() < 2) fail(e, "action without a name");
  ActionSchema a;
  a.name = expect_atom(e.items[1], "action name");
  const std::string owner = "action '" + a.name + "'";
  for (std::size_t i = 2; i < e.items.size(); i += 2) {
    const std::string& key = expect_atom(e.items[i], owner + " keyword");
    if (i + 1 >= e.items.size()) fail(e.items[i], owner + ": missing value for " + key);
    const SExpr& value = e.items[i + 1];
    if (key == ":parameters") {
      if (!value.is_list()) fail(value, owner + ": :parameters must be a list");
      a.params = parse_typed_list(value.items, 0, owner);
    } else if (key == ":precondition") {
      for (const SExpr* c : conjuncts(value)) a.precondition.push_back(parse_condition(*c, owner));
    } else if (key == ":effect") {
      for (const SExpr* c : conjuncts(value)) {
        Condition cond = parse_condition(*c, owner);
        auto* lit = std::get_if<Literal>(&cond);
        if (lit == nullptr) fail(*c, owner + ": effects must be literals");
        a.effect.push_back(*lit);
      }
    } else {
      fail(e.items[i], owner + ": unsupported action keyword '" + key + "'");
    }
  }
  return a;
}

inline void expect_define(const std::vector<SExpr>& top, std::string_view kind) {
  if (top.size() != 1) {
    throw ParseError("expected exactly one (define ...) form",
                     top.empty() ? SourcePos{} : top[1 % top.size()].pos);
  }
  const SExpr& def = top.front();
  if (!def.is_form("define") || def.items.size() < 2 || !def.items[1].is_form(kind) ||
      def.items[1].items.size() != 2) {
    fail(def, "expected (define (" + std::string(kind) + " <name>) ...)");
  }
}

}  // namespace detail

/// Parses the supported typed-STRIPS subset. Structural errors raise
/// ParseError with a position; semantic ones (undeclared type, arity
/// mismatch, duplicate action) raise ModelError.
inline DomainModel parse_domain(std::string_view text) {
  const auto top = read_sexprs(text);
  detail::expect_define(top, "domain");
  const SExpr& def = top.front();
  DomainModel d;
  d.name = detail::expect_atom(def.items[1].items[1], "domain name");
  for (std::size_t i = 2; i < def.items.size(); ++i) {
    const SExpr& section = def.items[i];
    if (!section.is_list() || section.items.empty()) detail::fail(section, "expected domain section");
    const std::string& key = detail::expect_atom(section.items[0], "section keyword");
    if (key == ":requirements") {
      for (std::size_t j = 1; j < section.items.size(); ++j) {
        const std::string& req = detail::expect_atom(section.items[j], "requirement flag");
        const auto& ok = supported_requirements();
        if (std::find(ok.begin(), ok.end(), req) == ok.end()) {
          detail::fail(section.items[j], "unsupported requirement '" + req + "'");
        }
        d.requirements.push_back(req);
      }
    } else if (key == ":types") {
      std::vector<std::string> pending;
      for (std::size_t j = 1; j < section.items.size(); ++j) {
        const std::string& tok = detail::expect_atom(section.items[j], "type name");
        if (tok == "-") {
          if (pending.empty() || j + 1 >= section.items.size()) {
            detail::fail(section.items[j], "malformed :types list");
          }
          const std::string& parent = detail::expect_atom(section.items[++j], "parent type");
          for (auto& name : pending) d.types.push_back({name, parent});
          pending.clear();
        } else {
          pending.push_back(tok);
        }
      }
      for (auto& name : pending) d.types.push_back({name, std::nullopt});
    } else if (key == ":constants") {
      d.constants = detail::parse_typed_list(section.items, 1, "constants");
    } else if (key == ":predicates") {
      for (std::size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& p = section.items[j];
        if (!p.is_list() || p.items.empty()) detail::fail(p, "expected predicate declaration");
        PredicateSchema schema;
        schema.name = detail::expect_atom(p.items[0], "predicate name");
        schema.params = detail::parse_typed_list(p.items, 1, "predicate '" + schema.name + "'");
        d.predicates.push_back(std::move(schema));
      }
    } else if (key == ":action") {
      d.actions.push_back(detail::parse_action(section));
    } else {
      detail::fail(section, "unsupported domain section '" + key + "'");
    }
  }
  validate_domain(d);
  return d;
}

/// Parses a problem. Consistency with a domain is checked separately by
/// `validate_problem`.
inline ProblemModel parse_problem(std::string_view text) {
  const auto top = read_sexprs(text);
  detail::expect_define(top, "problem");
  const SExpr& def = top.front();
  ProblemModel p;
  p.name = detail::expect_atom(def.items[1].items[1], "problem name");
  for (std::size_t i = 2; i < def.items.size(); ++i) {
    const SExpr& section = def.items[i];
    if (!section.is_list() || section.items.empty()) detail::fail(section, "expected problem section");
    const std::string& key = detail::expect_atom(section.items[0], "section keyword");
    if (key == ":domain") {
      if (section.items.size() != 2) detail::fail(section, ":domain takes one name");
      p.domain = detail::expect_atom(section.items[1], "domain name");
    } else if (key == ":objects") {
      p.objects = detail::parse_typed_list(section.items, 1, "objects");
    } else if (key == ":init") {
      for (std::size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& e = section.items[j];
        if (e.is_form("not")) detail::fail(e, "negative literals are implicit in :init (closed world)");
        p.init.push_back(detail::parse_atom(e));
      }
    } else if (key == ":goal") {
      if (section.items.size() != 2) detail::fail(section, ":goal takes one formula");
      for (const SExpr* c : detail::conjuncts(section.items[1])) {
        Condition cond = detail::parse_condition(*c, "goal");
        auto* lit = std::get_if<Literal>(&cond);
        if (lit == nullptr) detail::fail(*c, "goal must be a conjunction of literals");
        (lit->positive ? p.goal.positive : p.goal.negative).push_back(lit->atom);
      }
    } else {
      detail::fail(section, "unsupported problem section '" + key + "'");
    }
  }
  return p;
}

}  // namespace cookplan::pddl
