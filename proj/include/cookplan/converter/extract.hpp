#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/funcseq/funcseq.hpp"

namespace cookplan::converter {

/// The response holds no usable function sequence.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

/// Strips a leading `Step N:`, `N.` or `N)` marker; reports whether one was found.
inline bool strip_index(std::string_view& s) {
  std::string_view t = s;
  if (starts_with_ci(t, "step")) {
    t.remove_prefix(4);
    t = trim_view(t);
  }
  std::size_t n = 0;
  while (n < t.size() && std::isdigit(static_cast<unsigned char>(t[n]))) ++n;
  if (n == 0 || n == t.size()) return false;
  const char mark = t[n];
  if (mark != '.' && mark != ')' && mark != ':') return false;
  s = trim_view(t.substr(n + 1));
  return true;
}

/// Lowercases and turns runs of blanks or underscores inside an identifier
/// into single hyphens.
inline std::string normalize_identifier(std::string_view raw) {
  std::string out;
  bool pending = false;
  for (char c : trim_view(raw)) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '_') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back('-');
    pending = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

/// `Pour(Oil, frying pan), turn_on_stove(frying_pan)` ->
/// `pour(oil, frying-pan), turn-on-stove(frying-pan)`. Text that does not
/// have the call shape is only lowercased, so the parser can report it.
inline std::string normalize_calls(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (true) {
    const auto open = text.find('(', i);
    if (open == std::string_view::npos) break;
    const auto close = text.find(')', open);
    if (close == std::string_view::npos || text.find('(', open + 1) < close) break;
    if (!out.empty()) out += ", ";
    out += normalize_identifier(text.substr(i, open - i));
    out += "(";
    std::string_view args = text.substr(open + 1, close - open - 1);
    bool first = true;
    while (true) {
      const auto comma = args.find(',');
      if (!first) out += ", ";
      out += normalize_identifier(args.substr(0, comma));
      first = false;
      if (comma == std::string_view::npos) break;
      args.remove_prefix(comma + 1);
    }
    out += ")";
    i = close + 1;
    const auto rest = trim_view(text.substr(i));
    if (rest.empty()) return out;
    if (rest.front() != ',') break;
    i = text.find(',', i) + 1;
  }
  std::string lowered(text);
  for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lowered;
}

/// Whether `s` looks like one or more calls starting with a cooking
/// function: `name(` ... `)`.
inline bool call_shaped(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && (std::isalnum(static_cast<unsigned char>(s[n])) || s[n] == '-' || s[n] == '_')) ++n;
  if (n == 0 || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  std::size_t paren = n;
  while (paren < s.size() && s[paren] == ' ') ++paren;
  if (paren >= s.size() || s[paren] != '(' || s.back() != ')') return false;
  return funcseq::find_signature(normalize_identifier(s.substr(0, n))) != nullptr;
}

struct Candidate {
  int line = 0;
  bool indexed = false;
  bool blank_before = false;
  std::string text;  ///< normalized calls
  std::string original;
};

}  // namespace detail

/// Recovers a function sequence from free-form model output. Lines that
/// hold calls are kept, surrounding prose and code fences are dropped, list
/// markers and step labels are removed, and identifiers are normalized.
/// A numbered line, or a call line after anything else, starts a new step;
/// an unnumbered call line directly below another continues its step.
inline funcseq::FunctionSequence extract_sequence(std::string_view output) {
  std::vector<detail::Candidate> found;
  std::istringstream in{std::string(output)};
  std::string raw;
  int line_no = 0;
  bool previous_was_call = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view s = detail::trim_view(raw);
    if (s.rfind("```", 0) == 0 || s.empty()) {
      previous_was_call = false;
      continue;
    }
    if ((s.front() == '-' || s.front() == '*' || s.front() == '+') && s.size() > 1 && s[1] == ' ') {
      s = detail::trim_view(s.substr(1));
    }
    // Markdown emphasis and inline code marks never belong to the DSL.
    std::string plain;
    for (char ch : s) {
      if (ch != '`' && ch != '*') plain.push_back(ch);
    }
    s = detail::trim_view(plain);
    const bool indexed = detail::strip_index(s);
    while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) s.remove_suffix(1);
    s = detail::trim_view(s);
    if (!detail::call_shaped(s)) {
      previous_was_call = false;
      continue;
    }
    detail::Candidate c;
    c.line = line_no;
    c.indexed = indexed;
    c.blank_before = !previous_was_call;
    c.text = detail::normalize_calls(s);
    c.original = detail::trim_view(raw);
    found.push_back(std::move(c));
    previous_was_call = true;
  }
  if (found.empty()) throw ExtractionError("no function calls found in the response");

  std::string text;
  std::vector<int> source_line;  // normalized line -> response line
  std::vector<std::string> source_text;
  std::size_t step = 0;
  for (const auto& c : found) {
    if (c.indexed || c.blank_before || step == 0) {
      ++step;
      text += std::to_string(step) + ". " + c.text + "\n";
    } else {
      text += "   " + c.text + "\n";
    }
    source_line.push_back(c.line);
    source_text.push_back(c.original);
  }
  try {
    return funcseq::parse_sequence(text);
  } catch (const ParseError& e) {
    const auto idx = static_cast<std::size_t>(std::max(1, e.position().line)) - 1;
    if (idx < source_line.size()) {
      throw ExtractionError("response line " + std::to_string(source_line[idx]) + ": " + e.bare_message() +
                            " in '" + source_text[idx] + "'");
    }
    throw ExtractionError(std::string("cannot parse the extracted sequence: ") + e.bare_message());
  }
}

}  // namespace cookplan::converter
