#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/converter/known_recipes.hpp"
#include "cookplan/funcseq/funcseq.hpp"

namespace cookplan::converter {

namespace detail {

inline std::string with_newline(std::string_view text) {
  std::string out(text);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r' || out.back() == ' ')) out.pop_back();
  return out + "\n";
}

inline bool blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace detail

/// Few-shot prompt: instruction, function signatures, the exemplar pairs in
/// order, then the recipe to convert. The output depends only on the inputs.
inline std::string build_prompt(const std::vector<Exemplar>& exemplars, std::string_view recipe) {
  if (exemplars.empty()) throw ModelError("the prompt needs at least one exemplar");
  if (detail::blank(recipe)) throw ModelError("recipe text is empty");
  std::string out =
      "Convert the cooking recipe into a function sequence for a cooking robot.\n"
      "Write one numbered line per recipe step. Within a step, separate function calls with commas.\n"
      "Use only these functions, with lowercase hyphenated arguments:\n";
  for (const auto& sig : funcseq::signatures()) {
    out += "  " + std::string(sig.name) + "(";
    for (std::size_t i = 0; i < sig.slots.size(); ++i) {
      if (i) out += ", ";
      out += funcseq::to_string(sig.slots[i]);
    }
    out += ")\n";
  }
  out += "A mixture counts as an ingredient once it has been made with mix.\n";
  for (const auto& ex : exemplars) {
    out += "\nRecipe:\n" + detail::with_newline(ex.recipe);
    out += "Function sequence:\n" + detail::with_newline(ex.sequence);
  }
  out += "\nNow convert this recipe. Answer with the function sequence.\nRecipe:\n";
  out += detail::with_newline(recipe);
  return out;
}

}  // namespace cookplan::converter
