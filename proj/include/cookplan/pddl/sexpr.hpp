#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "cookplan/error.hpp"

namespace cookplan::pddl {

/// A node of a parsed s-expression. Atoms are lowercased (PDDL is
/// case-insensitive); lists keep their children in source order.
struct SExpr {
  enum class Kind { atom, list };

  Kind kind = Kind::atom;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_atom() const noexcept { return kind == Kind::atom; }
  bool is_list() const noexcept { return kind == Kind::list; }
  bool is_atom(std::string_view text) const { return is_atom() && atom == text; }

  /// List whose first element is the given atom, e.g. `(and ...)`.
  bool is_form(std::string_view head) const {
    return is_list() && !items.empty() && items.front().is_atom(head);
  }
};

namespace detail {

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (!at_end()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  bool at_end() const { return offset_ >= text_.size(); }
  char peek() const { return text_[offset_]; }

  void advance() {
    if (text_[offset_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++offset_;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_atom_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '-' || c == '_' || c == '?' || c == ':' || c == '=' ||
           c == '.';
  }

  SExpr read() {
    SExpr node;
    node.pos = pos_;
    const char c = peek();
    if (c == '(') {
      node.kind = SExpr::Kind::list;
      advance();
      skip_space();
      while (true) {
        if (at_end()) throw ParseError("unbalanced '(': missing ')'", node.pos);
        if (peek() == ')') {
          advance();
          break;
        }
        node.items.push_back(read());
        skip_space();
      }
      return node;
    }
    if (c == ')') throw ParseError("unexpected ')'", pos_);
    if (!is_atom_char(c)) {
      throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
    while (!at_end() && is_atom_char(peek())) {
      node.atom.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(peek()))));
      advance();
    }
    return node;
  }

  std::string_view text_;
  std::size_t offset_ = 0;
  SourcePos pos_;
};

}  // namespace detail

/// Reads every top-level s-expression of `text`. `;` starts a line comment.
inline std::vector<SExpr> read_sexprs(std::string_view text) {
  return detail::SExprReader(text).read_all();
}

}  // namespace cookplan::pddl
