#pragma once

#include <string_view>
#include <vector>

namespace cookplan::converter {

/// A recipe in natural language paired with its function sequence.
struct Exemplar {
  std::string_view name;
  std::string_view recipe;
  std::string_view sequence;
};

/// The three known recipes used as few-shot exemplars. The recipe texts are
/// identical to the files under data/recipes/.
inline const std::vector<Exemplar>& known_recipes() {
  static const std::vector<Exemplar> table = {
      {"sunny-side-up",
       "Sunny-side up egg.\n"
       "Pour a little oil into the frying pan and turn on the stove under the pan.\n"
       "Crack the egg into the frying pan.\n"
       "Cook the egg until the white sets and the yolk is still soft, then turn off the stove.\n",
       "1. pour(oil, frying-pan), turn-on-stove(frying-pan)\n"
       "2. pour(egg, frying-pan)\n"
       "3. cook(egg, cooked-egg), turn-off-stove(frying-pan)\n"},
      {"poached-egg",
       "Poached egg.\n"
       "Pour water into the pot and turn on the stove under the pot.\n"
       "Heat the water until it boils.\n"
       "Slide the egg into the pot, let it poach in the boiling water, then turn off the stove.\n",
       "1. pour(water, pot), turn-on-stove(pot)\n"
       "2. heat(water, boiled-water)\n"
       "3. pour(egg, pot), boil(egg, poached-egg), turn-off-stove(pot)\n"},
      {"scrambled-egg",
       "Scrambled egg.\n"
       "Whisk the egg and the milk together in a bowl to make an egg mixture.\n"
       "Put butter in the frying pan, turn on the stove and melt the butter.\n"
       "Pour the egg mixture into the frying pan, stir it with a spatula until scrambled, then turn off "
       "the stove.\n",
       "1. mix(egg, milk, egg-mixture, bowl, whisk)\n"
       "2. pour(butter, frying-pan), turn-on-stove(frying-pan), heat(butter, melted-butter)\n"
       "3. pour(egg-mixture, frying-pan), stir(egg-mixture, scrambled-egg, spatula), "
       "turn-off-stove(frying-pan)\n"},
  };
  return table;
}

}  // namespace cookplan::converter
