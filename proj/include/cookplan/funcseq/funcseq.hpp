#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cookplan/error.hpp"
#include "cookplan/kitchen/domain.hpp"
#include "cookplan/kitchen/scenario.hpp"

namespace cookplan::funcseq {

/// Argument kinds of the cooking-function slots.
enum class Slot { ingredient, vessel, tool, mixture, state };

inline std::string_view to_string(Slot slot) {
  switch (slot) {
    case Slot::ingredient: return "ingredient";
    case Slot::vessel: return "vessel";
    case Slot::tool: return "tool";
    case Slot::mixture: return "mixture";
    case Slot::state: return "state";
  }
  return "?";
}

struct Signature {
  std::string_view name;
  std::vector<Slot> slots;
};

/// The ten cooking functions with their argument kinds.
inline const std::vector<Signature>& signatures() {
  using S = Slot;
  static const std::vector<Signature> table = {
      {"pour", {S::ingredient, S::vessel}},
      {"mix", {S::ingredient, S::ingredient, S::mixture, S::vessel, S::tool}},
      {"turn-on-stove", {S::vessel}},
      {"set-stove", {S::state, S::vessel}},
      {"turn-off-stove", {S::vessel}},
      {"stir", {S::ingredient, S::state, S::tool}},
      {"heat", {S::ingredient, S::state}},
      {"cook", {S::ingredient, S::state}},
      {"boil", {S::ingredient, S::state}},
      {"stir-fry", {S::ingredient, S::state, S::tool}},
  };
  return table;
}

inline const Signature* find_signature(std::string_view name) {
  for (const auto& s : signatures()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

struct FunctionCall {
  std::string name;
  std::vector<std::string> args;
  /// Where the call name starts in the source; not part of equality.
  SourcePos pos;

  friend bool operator==(const FunctionCall& a, const FunctionCall& b) {
    return a.name == b.name && a.args == b.args;
  }
};

struct Step {
  std::vector<FunctionCall> calls;

  friend bool operator==(const Step&, const Step&) = default;
};

struct FunctionSequence {
  std::vector<Step> steps;

  friend bool operator==(const FunctionSequence&, const FunctionSequence&) = default;
};

/// `pour(oil, frying-pan)`
inline std::string to_string(const FunctionCall& call) {
  std::string out = call.name + "(";
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += ", ";
    out += call.args[i];
  }
  return out + ")";
}

/// Canonical form: one numbered line per step, calls separated by ", ".
inline std::string print_sequence(const FunctionSequence& fs) {
  std::string out;
  for (std::size_t s = 0; s < fs.steps.size(); ++s) {
    out += std::to_string(s + 1) + ". ";
    const auto& calls = fs.steps[s].calls;
    for (std::size_t c = 0; c < calls.size(); ++c) {
      if (c) out += ", ";
      out += to_string(calls[c]);
    }
    out += "\n";
  }
  return out;
}

namespace detail {

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  FunctionSequence run() {
    FunctionSequence fs;
    Step current;
    auto flush = [&]() {
      if (!current.calls.empty()) fs.steps.push_back(std::move(current));
      current = Step{};
    };
    bool need_call = false;        // after ','
    bool same_line_as_call = false;  // a call ended on this line with no ',' after it
    while (true) {
      const int newlines = skip_space();
      if (newlines > 0) same_line_as_call = false;
      if (newlines > 1 && !need_call) flush();
      if (at_end()) break;
      const SourcePos pos = here();
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) && index_ahead()) {
        if (need_call) throw ParseError("expected a function call after ','", pos);
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        advance();  // '.'
        flush();
        same_line_as_call = false;
        continue;
      }
      if (c == ',') {
        if (current.calls.empty() || need_call) throw ParseError("unexpected ','", pos);
        advance();
        need_call = true;
        same_line_as_call = false;
        continue;
      }
      if (c == ')') throw ParseError("unbalanced parentheses: unexpected ')'", pos);
      if (c == '(') throw ParseError("unbalanced parentheses: '(' without a function name", pos);
      if (!is_ident_char(c)) {
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
      }
      if (same_line_as_call) throw ParseError("expected ',' between function calls", pos);
      current.calls.push_back(parse_call());
      need_call = false;
      same_line_as_call = true;
    }
    if (need_call) throw ParseError("expected a function call after ','", here());
    flush();
    if (fs.steps.empty()) throw ParseError("no function calls found", SourcePos{1, 1});
    return fs;
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[i_]; }
  SourcePos here() const { return {line_, col_}; }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  /// Skips blanks; returns the number of newlines crossed.
  int skip_space() {
    int newlines = 0;
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      if (peek() == '\n') ++newlines;
      advance();
    }
    return newlines;
  }

  /// Digits followed by '.' form a step index.
  bool index_ahead() const {
    std::size_t j = i_;
    while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
    return j < text_.size() && text_[j] == '.';
  }

  std::string identifier(const char* what) {
    const SourcePos pos = here();
    std::string out;
    while (!at_end() && is_ident_char(peek())) {
      out.push_back(peek());
      advance();
    }
    if (out.empty()) {
      if (!at_end() && std::isupper(static_cast<unsigned char>(peek()))) {
        throw ParseError(std::string(what) + " must be lowercase", pos);
      }
      throw ParseError(std::string("expected ") + what, pos);
    }
    if (!at_end() && (std::isupper(static_cast<unsigned char>(peek())) || peek() == '_')) {
      throw ParseError(std::string(what) + " '" + out + "' contains '" + peek() +
                           "'; identifiers are lowercase letters, digits and hyphens",
                       here());
    }
    return out;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  FunctionCall parse_call() {
    FunctionCall call;
    call.pos = here();
    call.name = identifier("function name");
    skip_inline_space();
    if (peek() != '(') throw ParseError("expected '(' after '" + call.name + "'", here());
    const SourcePos open = here();
    advance();
    skip_space();
    if (peek() == ')') {
      advance();
    } else {
      while (true) {
        skip_space();
        if (at_end()) throw ParseError("unbalanced parentheses: missing ')'", open);
        if (peek() == '(') throw ParseError("unbalanced parentheses: unexpected '('", here());
        call.args.push_back(identifier("argument"));
        skip_space();
        if (at_end()) throw ParseError("unbalanced parentheses: missing ')'", open);
        if (peek() == ',') {
          advance();
          continue;
        }
        if (peek() == ')') {
          advance();
          break;
        }
        if (peek() == '(') throw ParseError("unbalanced parentheses: unexpected '('", here());
        throw ParseError(std::string("unexpected character '") + peek() + "' in arguments", here());
      }
    }
    const Signature* sig = find_signature(call.name);
    if (sig == nullptr) throw ParseError("unknown function '" + call.name + "'", call.pos);
    if (sig->slots.size() != call.args.size()) {
      throw ParseError(call.name + " expects " + std::to_string(sig->slots.size()) +
                           " arguments, got " + std::to_string(call.args.size()),
                       call.pos);
    }
    return call;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace detail

/// Parses `1. pour(oil, frying-pan), turn-on-stove(frying-pan)` style text.
/// A step index or a blank line starts a new step; calls within a step are
/// separated by ',' or by a line break.
inline FunctionSequence parse_sequence(std::string_view text) {
  return detail::Parser(text).run();
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { warning, error };

struct Diagnostic {
  Severity severity = Severity::warning;
  /// unknown-argument | kind-misuse | uncontained-ingredient | vessel-mismatch
  std::string code;
  std::string message;
  SourcePos pos;
  std::size_t step = 0;  ///< 1-based

  friend bool operator==(const Diagnostic& a, const Diagnostic& b) {
    return a.severity == b.severity && a.code == b.code && a.message == b.message &&
           a.step == b.step;
  }
};

/// `3:14: warning[unknown-argument]: ...`
inline std::string to_string(const Diagnostic& d) {
  return cookplan::to_string(d.pos) + ": " +
         (d.severity == Severity::error ? "error" : "warning") + "[" + d.code + "]: " + d.message;
}

/// Object kinds and initial containment known before the recipe starts.
struct KnownObjects {
  std::map<std::string, Slot> kinds;
  /// ingredient -> vessel
  std::map<std::string, std::string> containment;

  /// Domain constants only (water, pot, frying-pan, measuring-cup).
  static KnownObjects constants() {
    KnownObjects k;
    for (auto v : kitchen::kStoveVessels) k.kinds[std::string(v)] = Slot::vessel;
    k.kinds[std::string(kitchen::kMeasuringCup)] = Slot::vessel;
    k.kinds[std::string(kitchen::kWater)] = Slot::ingredient;
    k.kinds[std::string(kitchen::kDefaultIgnitionLevel)] = Slot::state;
    return k;
  }

  static KnownObjects from_scenario(const kitchen::ScenarioConfig& s) {
    KnownObjects k = constants();
    for (const auto& o : s.objects) {
      switch (o.kind) {
        case kitchen::ObjectKind::ingredient: k.kinds[o.name] = Slot::ingredient; break;
        case kitchen::ObjectKind::vessel: k.kinds[o.name] = Slot::vessel; break;
        case kitchen::ObjectKind::tool: k.kinds[o.name] = Slot::tool; break;
        case kitchen::ObjectKind::mixture: k.kinds[o.name] = Slot::mixture; break;
      }
    }
    for (const auto& st : s.states) k.kinds[st] = Slot::state;
    for (const auto& st : s.stove_levels) k.kinds[st] = Slot::state;
    k.kinds[s.ignition_level] = Slot::state;
    k.containment = s.containment;
    return k;
  }
};

namespace detail {

inline bool fits(Slot actual, Slot wanted) {
  return actual == wanted || (wanted == Slot::ingredient && actual == Slot::mixture);
}

inline bool is_state_targeting(std::string_view name) {
  return name == "stir" || name == "heat" || name == "cook" || name == "boil" ||
         name == "stir-fry";
}

}  // namespace detail

/// Continuity and kind checks. Never throws; an empty result means the
/// sequence is consistent with `known`.
inline std::vector<Diagnostic> validate_sequence(const FunctionSequence& fs,
                                                 const KnownObjects& known) {
  std::vector<Diagnostic> out;
  std::map<std::string, Slot> inferred;
  std::set<std::string> introduced;  // mixtures produced by an earlier mix
  std::map<std::string, std::string> vessel_of = known.containment;

  for (std::size_t s = 0; s < fs.steps.size(); ++s) {
    std::map<std::string, std::string> stove_switch;  // vessel -> first on/off call in this step
    for (const auto& call : fs.steps[s].calls) {
      const Signature* sig = find_signature(call.name);
      if (sig == nullptr || sig->slots.size() != call.args.size()) continue;
      auto report = [&](Severity sev, std::string code, std::string msg) {
        out.push_back({sev, std::move(code), std::move(msg), call.pos, s + 1});
      };
      for (std::size_t i = 0; i < call.args.size(); ++i) {
        const std::string& arg = call.args[i];
        const Slot wanted = sig->slots[i];
        std::optional<Slot> kind;
        std::string source;
        if (auto it = known.kinds.find(arg); it != known.kinds.end()) {
          kind = it->second;
          source = "is a " + std::string(to_string(*kind));
        } else if (introduced.contains(arg)) {
          kind = Slot::mixture;
          source = "is a mixture made earlier";
        } else if (auto inf = inferred.find(arg); inf != inferred.end()) {
          kind = inf->second;
          source = "was used as a " + std::string(to_string(*kind)) + " earlier";
        } else if (!(call.name == "mix" && wanted == Slot::mixture)) {
          report(Severity::warning, "unknown-argument",
                 "'" + arg + "' in " + to_string(call) +
                     " is not a known object or state and was not introduced earlier");
        }
        if (kind && !detail::fits(*kind, wanted)) {
          report(Severity::error, "kind-misuse",
                 "argument " + std::to_string(i + 1) + " of " + call.name + " must be a " +
                     std::string(to_string(wanted)) + ", but '" + arg + "' " + source);
        }
        if (!kind) inferred.emplace(arg, wanted);
      }

      const auto& a = call.args;
      if (call.name == "turn-on-stove" || call.name == "turn-off-stove") {
        auto [it, fresh] = stove_switch.emplace(a[0], call.name);
        if (!fresh && it->second != call.name) {
          report(Severity::error, "conflicting-stove",
                 "step " + std::to_string(s + 1) + " both turns on and turns off the stove under " + a[0] +
                     "; its goal cannot hold both");
          it->second = call.name;
        }
      }
      if (call.name == "pour") {
        vessel_of[a[0]] = a[1];
      } else if (call.name == "mix") {
        vessel_of.erase(a[0]);
        vessel_of.erase(a[1]);
        vessel_of[a[2]] = a[3];
        introduced.insert(a[2]);
      } else if (detail::is_state_targeting(call.name)) {
        auto it = vessel_of.find(a[0]);
        if (it == vessel_of.end()) {
          report(Severity::warning, "uncontained-ingredient",
                 to_string(call) + " acts on '" + a[0] + "', which was never put into a vessel");
        } else if (call.name == "cook" && it->second != "frying-pan") {
          report(Severity::warning, "vessel-mismatch",
                 to_string(call) + " needs '" + a[0] + "' in frying-pan, but it is in " + it->second);
        } else if (call.name == "boil" && it->second != "pot") {
          report(Severity::warning, "vessel-mismatch",
                 to_string(call) + " needs '" + a[0] + "' in pot, but it is in " + it->second);
        }
      }
    }
  }
  return out;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

inline std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) out += to_string(d) + "\n";
  return out;
}

}  // namespace cookplan::funcseq
