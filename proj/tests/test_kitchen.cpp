#include <catch_amalgamated.hpp>

#include <random>

#include "support/support.hpp"

using namespace cookplan;
using support::data;

namespace {

std::string expect_model_error(const std::string& text) {
  try {
    kitchen::parse_scenario(text);
  } catch (const ModelError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("the kitchen domain has ten cooking and seven basic actions") {
  const auto d = kitchen::build_domain();
  std::vector<std::string> names;
  for (const auto& a : d.actions) names.push_back(a.name);
  CHECK(names == std::vector<std::string>{"pour", "mix", "turn-on-stove", "set-stove", "turn-off-stove", "stir",
                                          "heat", "cook", "boil", "stir-fry", "hold", "place", "move-to",
                                          "open-tap", "close-tap", "fetch-water", "transfer"});
}

TEST_CASE("the ignition level is a domain constant used by turn-on-stove") {
  const auto d = kitchen::build_domain("low");
  const auto* on = d.find_action("turn-on-stove");
  REQUIRE(on != nullptr);
  bool found = false;
  for (const auto& lit : on->effect) found |= lit.atom == pddl::Atom{"stove-level", {"?v", "low"}};
  CHECK(found);
}

TEST_CASE("curated scenarios load with their documented initial state") {
  const auto k = pipeline::load_kitchen(data("scenarios/poached-egg.curated.scn"));
  const auto& init = k.problem.init;
  auto has = [&](pddl::Atom a) { return std::find(init.begin(), init.end(), a) != init.end(); };
  CHECK(has({"robot-at", {"sink"}}));
  CHECK(has({"object-at", {"measuring-cup", "sink"}}));
  CHECK(has({"object-at", {"pot", "stove"}}));
  CHECK(has({"hand-free", {"arm1"}}));
  CHECK(has({"hand-free", {"arm2"}}));
  CHECK(has({"stove-equipped", {"pot"}}));
  CHECK_FALSE(has({"stove-equipped", {"measuring-cup"}}));
  CHECK_FALSE(has({"tap-open", {}}));
}

TEST_CASE("all-in-kitchen scenarios place every object and the robot at the kitchen") {
  for (const auto& name : support::known_recipe_names()) {
    const auto s = kitchen::parse_scenario(support::read(data("scenarios/" + name + ".kitchen.scn")));
    CHECK(s.robot_spot == "kitchen");
    for (const auto& [object, placement] : s.placements) {
      CHECK(placement.kind == kitchen::Placement::Kind::spot);
      CHECK(placement.where == "kitchen");
    }
  }
}

TEST_CASE("scenario syntax errors report the line") {
  try {
    kitchen::parse_scenario("robot = stove\n[vessel pot\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position().line == 2);
  }
  try {
    kitchen::parse_scenario("robot = stove\n[vessel pot]\nat = stove\ncolour = red\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position().line == 4);
    CHECK_THAT(e.bare_message(), Catch::Matchers::ContainsSubstring("colour"));
  }
  CHECK_THROWS_AS(kitchen::parse_scenario("[gadget toaster]\n"), ParseError);
  CHECK_THROWS_AS(kitchen::parse_scenario("[vessel pot]\nat = stove\nat = sink\n"), ParseError);
}

TEST_CASE("inconsistent scenarios are rejected") {
  CHECK_THAT(expect_model_error("robot = attic\n"), Catch::Matchers::ContainsSubstring("unknown spot"));
  CHECK_THAT(expect_model_error("[ingredient egg]\nat = roof\n"), Catch::Matchers::ContainsSubstring("roof"));
  CHECK_THAT(expect_model_error("[ingredient water]\nat = sink\n"), Catch::Matchers::ContainsSubstring("tap"));
  CHECK_THAT(expect_model_error("[ingredient egg]\nin = bowl\n"), Catch::Matchers::ContainsSubstring("bowl"));
  CHECK_THAT(expect_model_error("[vessel bowl]\nheld = arm1\n[tool whisk]\nheld = arm1\n"),
             Catch::Matchers::ContainsSubstring("more than one"));
  CHECK_THAT(expect_model_error("stoves-on = bowl\n[vessel bowl]\nat = kitchen\n"),
             Catch::Matchers::ContainsSubstring("stove"));
  CHECK_THAT(expect_model_error("states = egg\n[ingredient egg]\nat = kitchen\n"),
             Catch::Matchers::ContainsSubstring("clashes"));
}

TEST_CASE("no move is ever applicable while the tap is open or a stove is on") {
  // Random walks over applicable actions; at every visited state, any
  // applicable move-to must see the tap closed and both stoves off.
  std::mt19937_64 rng(3);
  const auto k = pipeline::load_kitchen(data("scenarios/broccoli.kitchen.scn"));
  const auto tap = k.task.require({"tap-open", {}});
  const auto pot_on = k.task.require({"stove-on", {"pot"}});
  const auto pan_on = k.task.require({"stove-on", {"frying-pan"}});
  std::size_t steps = 0, moves_seen = 0, hazards_seen = 0;
  for (int walk = 0; walk < 20; ++walk) {
    auto state = k.task.init;
    for (int i = 0; i < 500; ++i, ++steps) {
      std::vector<std::size_t> applicable;
      for (std::size_t a = 0; a < k.task.actions.size(); ++a) {
        if (planner::applicable(state, k.task.actions[a])) applicable.push_back(a);
      }
      const bool hazard = state.test(tap) || state.test(pot_on) || state.test(pan_on);
      hazards_seen += hazard ? 1 : 0;
      for (auto a : applicable) {
        if (k.task.actions[a].schema_name != "move-to") continue;
        ++moves_seen;
        REQUIRE_FALSE(hazard);
      }
      REQUIRE_FALSE(applicable.empty());
      state = planner::successor(
          state, k.task.actions[applicable[std::uniform_int_distribution<std::size_t>(0, applicable.size() - 1)(rng)]]);
    }
  }
  CHECK(steps == 10000);
  CHECK(moves_seen > 0);
  CHECK(hazards_seen > 0);
}

TEST_CASE("hands and locations stay consistent along random walks") {
  std::mt19937_64 rng(5);
  const auto k = pipeline::load_kitchen(data("scenarios/scrambled-egg.kitchen.scn"));
  const auto replayer = k.replayer();
  auto state = replayer.initial();
  const auto all = k.task.actions;
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> applicable;
    for (const auto& a : all) {
      auto probe = state;
      if (replayer.apply(probe, a.name()).failures.empty()) applicable.push_back(a.name());
    }
    REQUIRE_FALSE(applicable.empty());
    const auto& pick = applicable[std::uniform_int_distribution<std::size_t>(0, applicable.size() - 1)(rng)];
    replayer.apply(state, pick);
    int robot_spots = 0;
    for (auto spot : kitchen::kSpots) robot_spots += state.contains("(robot-at " + std::string(spot) + ")");
    REQUIRE(robot_spots == 1);
    for (auto arm : kitchen::kArms) {
      int held = 0;
      for (const auto& atom : state) held += atom.rfind("(holding " + std::string(arm) + " ", 0) == 0;
      const bool free = state.contains("(hand-free " + std::string(arm) + ")");
      REQUIRE(held + (free ? 1 : 0) == 1);
    }
  }
}
