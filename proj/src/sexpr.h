#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace adteager {

struct SExpr
{
  enum class Kind { Symbol, Keyword, Numeral, Decimal, Hexadecimal, Binary, String, List };

  Kind kind = Kind::List;
  std::string text;      // atoms: symbol name (unquoted), literal text
  bool quoted = false;   // symbol was written |like this|
  std::vector<SExpr> items;
  std::size_t line = 0;
  std::size_t column = 0;

  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_symbol(std::string_view name) const
  {
    return kind == Kind::Symbol && !quoted && text == name;
  }
  bool is_list() const { return kind == Kind::List; }
  /// Short rendering for diagnostics.
  std::string to_string(std::size_t limit = 200) const;
};

/// Reads a sequence of top-level s-expressions. Throws Error(Syntax) with
/// position on lexical errors, unbalanced parentheses or nesting deeper than
/// `max_depth`.
std::vector<SExpr> read_sexprs(std::string_view text, std::size_t max_depth);

}  // namespace adteager
