#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/kitchen/domain.hpp"
#include "cookplan/pddl/model.hpp"

namespace cookplan::kitchen {

enum class ObjectKind { ingredient, vessel, tool, mixture };

inline std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::ingredient: return "ingredient";
    case ObjectKind::vessel: return "vessel";
    case ObjectKind::tool: return "tool";
    case ObjectKind::mixture: return "mixture";
  }
  return "?";
}

inline std::optional<ObjectKind> parse_kind(std::string_view text) {
  if (text == "ingredient") return ObjectKind::ingredient;
  if (text == "vessel") return ObjectKind::vessel;
  if (text == "tool") return ObjectKind::tool;
  if (text == "mixture") return ObjectKind::mixture;
  return std::nullopt;
}

struct KitchenObject {
  std::string name;
  ObjectKind kind = ObjectKind::ingredient;
  bool stove_equipped = false;

  friend bool operator==(const KitchenObject&, const KitchenObject&) = default;
};

struct Placement {
  enum class Kind { absent, spot, held };
  Kind kind = Kind::absent;
  /// Spot name or arm name.
  std::string where;

  friend bool operator==(const Placement&, const Placement&) = default;

  static Placement at(std::string spot) { return {Kind::spot, std::move(spot)}; }
  static Placement held_by(std::string arm) { return {Kind::held, std::move(arm)}; }
};

struct MixtureDecl {
  std::string name;
  std::vector<std::string> constituents;

  friend bool operator==(const MixtureDecl&, const MixtureDecl&) = default;
};

/// Initial kitchen setup for one planning run.
struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<KitchenObject> objects;
  std::map<std::string, Placement> placements;
  std::string robot_spot = "kitchen";
  /// Target ingredient states the recipe may refer to.
  std::vector<std::string> states;
  std::vector<std::string> stove_levels;
  std::string ignition_level = std::string(kDefaultIgnitionLevel);
  std::vector<MixtureDecl> mixtures;
  /// ingredient -> vessel
  std::map<std::string, std::string> containment;
  /// Appliance state at start; both default to off.
  std::vector<std::string> stoves_on;
  bool tap_open = false;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

  const KitchenObject* find(std::string_view object) const {
    auto it = std::find_if(objects.begin(), objects.end(),
                           [&](const KitchenObject& o) { return o.name == object; });
    return it == objects.end() ? nullptr : &*it;
  }
};

namespace detail {

inline bool is_spot(std::string_view s) {
  return std::find(kSpots.begin(), kSpots.end(), s) != kSpots.end();
}
inline bool is_arm(std::string_view s) {
  return std::find(kArms.begin(), kArms.end(), s) != kArms.end();
}
inline bool is_stove_vessel(std::string_view s) {
  return std::find(kStoveVessels.begin(), kStoveVessels.end(), s) != kStoveVessels.end();
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (auto t = trim(cur); !t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (auto t = trim(cur); !t.empty()) out.push_back(t);
  return out;
}

inline bool parse_bool(const std::string& value, SourcePos pos) {
  if (value == "true" || value == "yes") return true;
  if (value == "false" || value == "no") return false;
  throw ParseError("expected true/false, got '" + value + "'", pos);
}

}  // namespace detail

/// Checks the scenario invariants. Throws ModelError naming the offending object.
inline void validate_scenario(const ScenarioConfig& s) {
  using detail::is_arm;
  using detail::is_spot;
  if (!is_spot(s.robot_spot)) throw ModelError("robot placed at unknown spot '" + s.robot_spot + "'");

  std::map<std::string, ObjectKind> kinds;
  for (const auto& o : s.objects) {
    if (!kinds.emplace(o.name, o.kind).second) throw ModelError("object '" + o.name + "' declared twice");
    if (is_spot(o.name) || is_arm(o.name)) throw ModelError("object name '" + o.name + "' is reserved");
    if (o.stove_equipped && !(o.kind == ObjectKind::vessel && detail::is_stove_vessel(o.name))) {
      throw ModelError("only the pot and frying-pan vessels can be stove-equipped, not '" + o.name + "'");
    }
    const bool constant_vessel =
        detail::is_stove_vessel(o.name) || o.name == kMeasuringCup;
    if (constant_vessel && o.kind != ObjectKind::vessel) {
      throw ModelError("'" + o.name + "' is a vessel constant of the domain");
    }
    if (o.name == kWater && o.kind != ObjectKind::ingredient) {
      throw ModelError("'water' is an ingredient constant of the domain");
    }
  }
  for (const auto& st : s.states) {
    if (kinds.contains(st)) throw ModelError("state '" + st + "' clashes with an object name");
  }

  std::set<std::string> arms_used;
  for (const auto& [object, placement] : s.placements) {
    auto it = kinds.find(object);
    if (it == kinds.end()) throw ModelError("placement for undeclared object '" + object + "'");
    if (object == kWater && placement.kind != Placement::Kind::absent) {
      throw ModelError("water cannot be pre-placed; it comes from the tap");
    }
    if (it->second == ObjectKind::mixture && placement.kind != Placement::Kind::absent) {
      throw ModelError("mixture '" + object + "' does not exist before it is mixed");
    }
    if (placement.kind == Placement::Kind::spot && !is_spot(placement.where)) {
      throw ModelError("object '" + object + "' placed at unknown spot '" + placement.where + "'");
    }
    if (placement.kind == Placement::Kind::held) {
      if (!is_arm(placement.where)) {
        throw ModelError("object '" + object + "' held by unknown arm '" + placement.where + "'");
      }
      if (!arms_used.insert(placement.where).second) {
        throw ModelError("arm '" + placement.where + "' holds more than one object");
      }
    }
  }

  for (const auto& [ingredient, vessel] : s.containment) {
    auto it = kinds.find(ingredient);
    if (it == kinds.end() || it->second != ObjectKind::ingredient) {
      throw ModelError("containment of '" + ingredient + "': not a declared ingredient");
    }
    if (ingredient == kWater) throw ModelError("water cannot be pre-placed; it comes from the tap");
    auto v = kinds.find(vessel);
    if (v == kinds.end() || v->second != ObjectKind::vessel) {
      throw ModelError("containment of '" + ingredient + "': '" + vessel + "' is not a declared vessel");
    }
    auto p = s.placements.find(ingredient);
    if (p != s.placements.end() && p->second.kind != Placement::Kind::absent) {
      throw ModelError("ingredient '" + ingredient + "' is both contained and placed");
    }
  }

  for (const auto& m : s.mixtures) {
    auto it = kinds.find(m.name);
    if (it == kinds.end() || it->second != ObjectKind::mixture) {
      throw ModelError("mixture '" + m.name + "' is not declared as a mixture object");
    }
    for (const auto& c : m.constituents) {
      auto ci = kinds.find(c);
      if (ci == kinds.end() && c != kWater) {
        throw ModelError("mixture constituent '" + c + "' of '" + m.name + "' is not among objects");
      }
      if (ci != kinds.end() && ci->second != ObjectKind::ingredient && ci->second != ObjectKind::mixture) {
        throw ModelError("mixture constituent '" + c + "' of '" + m.name + "' is not an ingredient");
      }
    }
  }

  for (const auto& v : s.stoves_on) {
    const auto* o = s.find(v);
    if (o == nullptr || !o->stove_equipped) {
      throw ModelError("stove of '" + v + "' cannot be on: not a stove-equipped vessel");
    }
  }
}

/// Problem for the kitchen domain: objects, closed-world initial state,
/// empty goal (goals are supplied per recipe step).
inline pddl::ProblemModel build_problem(const ScenarioConfig& s) {
  validate_scenario(s);
  const pddl::DomainModel domain = build_domain(s.ignition_level);
  std::set<std::string> constants;
  for (const auto& c : domain.constants) constants.insert(c.name);

  pddl::ProblemModel p;
  p.name = s.name;
  p.domain = domain.name;
  for (const auto& o : s.objects) {
    if (!constants.contains(o.name)) p.objects.push_back({o.name, std::string(to_string(o.kind))});
  }
  std::set<std::string> seen_states;
  auto add_state = [&](const std::string& st) {
    if (constants.contains(st) || !seen_states.insert(st).second) return;
    p.objects.push_back({st, "state"});
  };
  for (const auto& st : s.stove_levels) add_state(st);
  for (const auto& st : s.states) add_state(st);

  std::vector<pddl::Atom> init;
  init.push_back({"robot-at", {s.robot_spot}});
  std::set<std::string> busy;
  for (const auto& [object, placement] : s.placements) {
    if (placement.kind == Placement::Kind::spot) {
      init.push_back({"object-at", {object, placement.where}});
    } else if (placement.kind == Placement::Kind::held) {
      init.push_back({"holding", {placement.where, object}});
      busy.insert(placement.where);
    }
  }
  for (auto arm : kArms) {
    if (!busy.contains(std::string(arm))) init.push_back({"hand-free", {std::string(arm)}});
  }
  for (const auto& [ingredient, vessel] : s.containment) init.push_back({"in", {ingredient, vessel}});
  for (const auto& o : s.objects) {
    if (o.stove_equipped) init.push_back({"stove-equipped", {o.name}});
  }
  for (const auto& v : s.stoves_on) {
    init.push_back({"stove-on", {v}});
    init.push_back({"stove-level", {v, s.ignition_level}});
  }
  if (s.tap_open) init.push_back({"tap-open", {}});
  std::sort(init.begin(), init.end());
  p.init = std::move(init);
  pddl::validate_problem(domain, p);
  return p;
}

/// Parses the scenario text format:
///
///     robot = sink
///     states = boiled-water, poached-egg
///     [vessel pot]
///     at = stove
///     [ingredient milk]
///     in = bowl
///     [mixture egg-mixture]
///     from = egg, milk
inline ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig s;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::optional<std::size_t> current;
  std::optional<bool> current_equipped;
  auto finish_object = [&]() {
    if (current) {
      auto& o = s.objects[*current];
      o.stove_equipped = current_equipped.value_or(o.kind == ObjectKind::vessel &&
                                                   detail::is_stove_vessel(o.name));
    }
    current_equipped.reset();
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const SourcePos pos{line_no, 1};
    std::string line = raw.substr(0, raw.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", pos);
      finish_object();
      std::istringstream header(line.substr(1, line.size() - 2));
      std::string kind_text, name, extra;
      header >> kind_text >> name;
      if (name.empty() || (header >> extra)) throw ParseError("expected [<kind> <name>]", pos);
      auto kind = parse_kind(kind_text);
      if (!kind) throw ParseError("unknown object kind '" + kind_text + "'", pos);
      s.objects.push_back({name, *kind, false});
      current = s.objects.size() - 1;
      if (*kind == ObjectKind::mixture) s.mixtures.push_back({name, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", pos);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!current) {
      if (key == "name") s.name = value;
      else if (key == "robot") s.robot_spot = value;
      else if (key == "states") s.states = detail::split_list(value);
      else if (key == "stove-levels") s.stove_levels = detail::split_list(value);
      else if (key == "ignition-level") s.ignition_level = value;
      else if (key == "stoves-on") s.stoves_on = detail::split_list(value);
      else if (key == "tap-open") s.tap_open = detail::parse_bool(value, pos);
      else throw ParseError("unknown scenario key '" + key + "'", pos);
      continue;
    }
    const std::string object = s.objects[*current].name;
    const ObjectKind kind = s.objects[*current].kind;
    if (key == "at" || key == "held") {
      if (s.placements.contains(object)) {
        throw ParseError("object '" + object + "' has more than one location", pos);
      }
      s.placements[object] = key == "at" ? Placement::at(value) : Placement::held_by(value);
    } else if (key == "in") {
      s.containment[object] = value;
    } else if (key == "from") {
      if (kind != ObjectKind::mixture) throw ParseError("'from' applies to mixtures only", pos);
      s.mixtures.back().constituents = detail::split_list(value);
    } else if (key == "stove-equipped") {
      current_equipped = detail::parse_bool(value, pos);
    } else {
      throw ParseError("unknown object key '" + key + "'", pos);
    }
  }
  finish_object();
  validate_scenario(s);
  return s;
}

}  // namespace cookplan::kitchen
