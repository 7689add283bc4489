#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "cookplan/pddl/model.hpp"

namespace cookplan::kitchen {

inline constexpr std::array<std::string_view, 3> kSpots = {"stove", "kitchen", "sink"};
inline constexpr std::array<std::string_view, 2> kArms = {"arm1", "arm2"};
/// Vessels that sit on a stove burner; move-to requires both burners off.
inline constexpr std::array<std::string_view, 2> kStoveVessels = {"pot", "frying-pan"};
inline constexpr std::string_view kMeasuringCup = "measuring-cup";
inline constexpr std::string_view kWater = "water";
inline constexpr std::string_view kDefaultIgnitionLevel = "medium";

/// The ten recipe-level functions; the remaining seven actions are basic ones.
inline constexpr std::array<std::string_view, 10> kCookingFunctions = {
    "pour", "mix", "turn-on-stove", "set-stove", "turn-off-stove",
    "stir", "heat", "cook", "boil", "stir-fry"};
inline constexpr std::array<std::string_view, 7> kBasicActions = {
    "hold", "place", "move-to", "open-tap", "close-tap", "fetch-water", "transfer"};

namespace detail {

using pddl::ActionSchema;
using pddl::Atom;
using pddl::Condition;
using pddl::Equality;
using pddl::Literal;
using pddl::TypedName;

inline Literal pos(std::string pred, std::vector<std::string> args = {}) {
  return Literal{Atom{std::move(pred), std::move(args)}, true};
}
inline Literal neg(std::string pred, std::vector<std::string> args = {}) {
  return Literal{Atom{std::move(pred), std::move(args)}, false};
}
inline Equality distinct(std::string a, std::string b) {
  return Equality{std::move(a), std::move(b), false};
}

inline ActionSchema action(std::string name, std::vector<TypedName> params,
                           std::vector<Condition> pre, std::vector<Literal> eff) {
  return ActionSchema{std::move(name), std::move(params), std::move(pre), std::move(eff)};
}

}  // namespace detail

/// Builds the kitchen domain: types, fixed constants, predicate vocabulary and
/// the 17 action schemas. `ignition_level` is the heat level a stove starts
/// at when turned on; it is declared as a `state` constant.
inline pddl::DomainModel build_domain(std::string_view ignition_level = kDefaultIgnitionLevel) {
  using namespace detail;
  const std::string ignition(ignition_level);
  pddl::DomainModel d;
  d.name = "kitchen";
  d.requirements = {":strips", ":typing", ":negative-preconditions", ":equality"};
  d.types = {
      {"object", "object-root"}, {"ingredient", "object"},  {"vessel", "object"},
      {"tool", "object"},        {"mixture", "ingredient"}, {"state", "object-root"},
      {"spot", "object-root"},   {"arm", "object-root"},    {"object-root", std::nullopt},
  };
  for (auto s : kSpots) d.constants.push_back({std::string(s), "spot"});
  for (auto a : kArms) d.constants.push_back({std::string(a), "arm"});
  for (auto v : kStoveVessels) d.constants.push_back({std::string(v), "vessel"});
  d.constants.push_back({std::string(kMeasuringCup), "vessel"});
  d.constants.push_back({std::string(kWater), "ingredient"});
  d.constants.push_back({ignition, "state"});

  d.predicates = {
      {"robot-at", {{"?s", "spot"}}},
      {"object-at", {{"?o", "object"}, {"?s", "spot"}}},
      {"holding", {{"?a", "arm"}, {"?o", "object"}}},
      {"hand-free", {{"?a", "arm"}}},
      {"in", {{"?i", "ingredient"}, {"?v", "vessel"}}},
      {"stove-on", {{"?v", "vessel"}}},
      {"stove-level", {{"?v", "vessel"}, {"?st", "state"}}},
      {"tap-open", {}},
      {"ingredient-state", {{"?i", "ingredient"}, {"?st", "state"}}},
      {"mixture-made", {{"?m", "mixture"}}},
      // Static: the vessel has its own burner (pot and frying-pan only).
      {"stove-equipped", {{"?v", "vessel"}}},
  };

  // Cooking functions.
  d.actions.push_back(action(
      "pour", {{"?i", "ingredient"}, {"?v", "vessel"}, {"?a", "arm"}, {"?s", "spot"}},
      {pos("holding", {"?a", "?i"}), pos("robot-at", {"?s"}), pos("object-at", {"?v", "?s"})},
      {pos("in", {"?i", "?v"}), neg("holding", {"?a", "?i"}), pos("hand-free", {"?a"})}));
  d.actions.push_back(action(
      "mix",
      {{"?m", "mixture"}, {"?i1", "ingredient"}, {"?i2", "ingredient"}, {"?v", "vessel"},
       {"?t", "tool"}, {"?s", "spot"}, {"?a1", "arm"}, {"?a2", "arm"}},
      {distinct("?i1", "?i2"), distinct("?m", "?i1"), distinct("?m", "?i2"),
       distinct("?a1", "?a2"), pos("in", {"?i1", "?v"}), pos("in", {"?i2", "?v"}),
       pos("object-at", {"?v", "?s"}), pos("robot-at", {"?s"}), pos("holding", {"?a1", "?t"}),
       pos("hand-free", {"?a2"})},
      {pos("mixture-made", {"?m"}), pos("in", {"?m", "?v"}), neg("in", {"?i1", "?v"}),
       neg("in", {"?i2", "?v"})}));
  d.actions.push_back(action(
      "turn-on-stove", {{"?v", "vessel"}, {"?a", "arm"}},
      {pos("stove-equipped", {"?v"}), pos("robot-at", {"stove"}), pos("hand-free", {"?a"}),
       neg("stove-on", {"?v"})},
      {pos("stove-on", {"?v"}), pos("stove-level", {"?v", ignition})}));
  d.actions.push_back(action(
      "set-stove", {{"?from", "state"}, {"?to", "state"}, {"?v", "vessel"}, {"?a", "arm"}},
      {distinct("?from", "?to"), pos("robot-at", {"stove"}), pos("stove-on", {"?v"}),
       pos("stove-level", {"?v", "?from"})},
      {neg("stove-level", {"?v", "?from"}), pos("stove-level", {"?v", "?to"})}));
  d.actions.push_back(action(
      "turn-off-stove", {{"?st", "state"}, {"?v", "vessel"}, {"?a", "arm"}},
      {pos("robot-at", {"stove"}), pos("hand-free", {"?a"}), pos("stove-on", {"?v"}),
       pos("stove-level", {"?v", "?st"})},
      {neg("stove-on", {"?v"}), neg("stove-level", {"?v", "?st"})}));
  d.actions.push_back(action(
      "stir",
      {{"?i", "ingredient"}, {"?t", "tool"}, {"?v", "vessel"}, {"?st", "state"}, {"?s", "spot"},
       {"?a", "arm"}},
      {pos("in", {"?i", "?v"}), pos("object-at", {"?v", "?s"}), pos("robot-at", {"?s"}),
       pos("holding", {"?a", "?t"})},
      {pos("ingredient-state", {"?i", "?st"})}));
  d.actions.push_back(action(
      "heat", {{"?i", "ingredient"}, {"?v", "vessel"}, {"?st", "state"}},
      {pos("in", {"?i", "?v"}), pos("object-at", {"?v", "stove"}), pos("robot-at", {"stove"}),
       pos("stove-on", {"?v"})},
      {pos("ingredient-state", {"?i", "?st"})}));
  d.actions.push_back(action(
      "cook", {{"?i", "ingredient"}, {"?st", "state"}},
      {pos("in", {"?i", "frying-pan"}), pos("object-at", {"frying-pan", "stove"}),
       pos("robot-at", {"stove"}), pos("stove-on", {"frying-pan"})},
      {pos("ingredient-state", {"?i", "?st"})}));
  d.actions.push_back(action(
      "boil", {{"?i", "ingredient"}, {"?st", "state"}},
      {pos("in", {"?i", "pot"}), pos("object-at", {"pot", "stove"}), pos("robot-at", {"stove"}),
       pos("stove-on", {"pot"})},
      {pos("ingredient-state", {"?i", "?st"})}));
  d.actions.push_back(action(
      "stir-fry",
      {{"?i", "ingredient"}, {"?v", "vessel"}, {"?t", "tool"}, {"?st", "state"}, {"?a1", "arm"},
       {"?a2", "arm"}},
      {distinct("?a1", "?a2"), pos("in", {"?i", "?v"}), pos("object-at", {"?v", "stove"}),
       pos("robot-at", {"stove"}), pos("holding", {"?a1", "?t"}), pos("hand-free", {"?a2"}),
       pos("stove-on", {"?v"})},
      {pos("ingredient-state", {"?i", "?st"})}));

  // Basic actions.
  d.actions.push_back(action(
      "hold", {{"?o", "object"}, {"?a", "arm"}, {"?s", "spot"}},
      {pos("object-at", {"?o", "?s"}), pos("robot-at", {"?s"}), pos("hand-free", {"?a"})},
      {pos("holding", {"?a", "?o"}), neg("hand-free", {"?a"}), neg("object-at", {"?o", "?s"})}));
  d.actions.push_back(action(
      "place", {{"?o", "object"}, {"?a", "arm"}, {"?s", "spot"}},
      {pos("holding", {"?a", "?o"}), pos("robot-at", {"?s"})},
      {pos("object-at", {"?o", "?s"}), pos("hand-free", {"?a"}), neg("holding", {"?a", "?o"})}));
  {
    std::vector<pddl::Condition> pre = {distinct("?from", "?to"), pos("robot-at", {"?from"}),
                                        neg("tap-open")};
    for (auto v : kStoveVessels) pre.push_back(neg("stove-on", {std::string(v)}));
    d.actions.push_back(action("move-to", {{"?from", "spot"}, {"?to", "spot"}}, std::move(pre),
                               {pos("robot-at", {"?to"}), neg("robot-at", {"?from"})}));
  }
  d.actions.push_back(action("open-tap", {{"?a", "arm"}},
                             {pos("robot-at", {"sink"}), pos("hand-free", {"?a"}), neg("tap-open")},
                             {pos("tap-open")}));
  d.actions.push_back(action("close-tap", {{"?a", "arm"}},
                             {pos("robot-at", {"sink"}), pos("hand-free", {"?a"}), pos("tap-open")},
                             {neg("tap-open")}));
  d.actions.push_back(action(
      "fetch-water", {{"?a", "arm"}},
      {pos("robot-at", {"sink"}), pos("holding", {"?a", std::string(kMeasuringCup)}),
       pos("tap-open")},
      {pos("in", {std::string(kWater), std::string(kMeasuringCup)})}));
  d.actions.push_back(action(
      "transfer",
      {{"?i", "ingredient"}, {"?from", "vessel"}, {"?to", "vessel"}, {"?a", "arm"},
       {"?s", "spot"}},
      {distinct("?from", "?to"), pos("holding", {"?a", "?from"}), pos("in", {"?i", "?from"}),
       pos("robot-at", {"?s"}), pos("object-at", {"?to", "?s"})},
      {neg("in", {"?i", "?from"}), pos("in", {"?i", "?to"})}));

  pddl::validate_domain(d);
  return d;
}

}  // namespace cookplan::kitchen
