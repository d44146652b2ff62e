#include "sexpr.h"

#include <cctype>

#include "adteager/error.h"

namespace adteager {

namespace {

bool is_simple_char(char c)
{
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
  {
    return true;
  }
  return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Reader
{
 public:
  Reader(std::string_view text, std::size_t max_depth) : text_(text), max_depth_(max_depth) {}

  std::vector<SExpr> read_all()
  {
    std::vector<SExpr> top;
    std::vector<SExpr> stack;
    while (true)
    {
      skip_blank();
      if (at_end())
      {
        break;
      }
      char c = peek();
      if (c == '(')
      {
        if (stack.size() >= max_depth_)
        {
          fail("nesting deeper than " + std::to_string(max_depth_));
        }
        SExpr list;
        list.kind = SExpr::Kind::List;
        list.line = line_;
        list.column = column_;
        advance();
        stack.push_back(std::move(list));
        continue;
      }
      if (c == ')')
      {
        if (stack.empty())
        {
          fail("unexpected ')'");
        }
        advance();
        SExpr done = std::move(stack.back());
        stack.pop_back();
        emit(std::move(done), stack, top);
        continue;
      }
      emit(read_atom(), stack, top);
    }
    if (!stack.empty())
    {
      throw Error(ErrorKind::Syntax, "frontend", "unclosed '('", stack.back().line,
                  stack.back().column);
    }
    return top;
  }

 private:
  static void emit(SExpr e, std::vector<SExpr>& stack, std::vector<SExpr>& top)
  {
    if (stack.empty())
    {
      top.push_back(std::move(e));
    }
    else
    {
      stack.back().items.push_back(std::move(e));
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance()
  {
    if (text_[pos_] == '\n')
    {
      ++line_;
      column_ = 1;
    }
    else
    {
      ++column_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message) const
  {
    throw Error(ErrorKind::Syntax, "frontend", message, line_, column_);
  }

  void skip_blank()
  {
    while (!at_end())
    {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
      {
        advance();
      }
      else if (c == ';')
      {
        while (!at_end() && peek() != '\n')
        {
          advance();
        }
      }
      else
      {
        break;
      }
    }
  }

  SExpr read_atom()
  {
    SExpr atom;
    atom.line = line_;
    atom.column = column_;
    char c = peek();
    if (c == '|')
    {
      advance();
      std::string name;
      while (true)
      {
        if (at_end())
        {
          throw Error(ErrorKind::Syntax, "frontend", "unterminated quoted symbol", atom.line,
                      atom.column);
        }
        char d = peek();
        if (d == '|')
        {
          advance();
          break;
        }
        if (d == '\\')
        {
          fail("backslash in quoted symbol");
        }
        name += d;
        advance();
      }
      atom.kind = SExpr::Kind::Symbol;
      atom.quoted = true;
      atom.text = std::move(name);
      return atom;
    }
    if (c == '"')
    {
      advance();
      std::string value;
      while (true)
      {
        if (at_end())
        {
          throw Error(ErrorKind::Syntax, "frontend", "unterminated string literal", atom.line,
                      atom.column);
        }
        char d = peek();
        advance();
        if (d == '"')
        {
          if (!at_end() && peek() == '"')
          {
            value += '"';
            advance();
            continue;
          }
          break;
        }
        value += d;
      }
      atom.kind = SExpr::Kind::String;
      atom.text = std::move(value);
      return atom;
    }
    if (c == '#')
    {
      advance();
      if (at_end() || (peek() != 'x' && peek() != 'b'))
      {
        fail("malformed '#' literal");
      }
      bool hex = peek() == 'x';
      advance();
      std::string digits;
      while (!at_end() && is_simple_char(peek()))
      {
        char d = peek();
        bool ok = hex ? std::isxdigit(static_cast<unsigned char>(d)) != 0 : (d == '0' || d == '1');
        if (!ok)
        {
          fail("malformed '#' literal");
        }
        digits += d;
        advance();
      }
      if (digits.empty())
      {
        fail("malformed '#' literal");
      }
      atom.kind = hex ? SExpr::Kind::Hexadecimal : SExpr::Kind::Binary;
      atom.text = (hex ? "#x" : "#b") + digits;
      return atom;
    }
    bool keyword = c == ':';
    if (keyword)
    {
      advance();
    }
    std::string token;
    while (!at_end() && is_simple_char(peek()))
    {
      token += peek();
      advance();
    }
    if (token.empty())
    {
      if (!at_end() && static_cast<unsigned char>(peek()) >= 0x80)
      {
        fail("non-ASCII character outside quoted symbol or string");
      }
      fail(std::string("unexpected character '") + peek() + "'");
    }
    if (keyword)
    {
      atom.kind = SExpr::Kind::Keyword;
      atom.text = ":" + token;
      return atom;
    }
    if (is_digit(token[0]))
    {
      std::size_t i = 0;
      while (i < token.size() && is_digit(token[i]))
      {
        ++i;
      }
      if (i == token.size())
      {
        if (token.size() > 1 && token[0] == '0')
        {
          fail("numeral with leading zero");
        }
        atom.kind = SExpr::Kind::Numeral;
      }
      else if (token[i] == '.' && i + 1 < token.size())
      {
        for (std::size_t j = i + 1; j < token.size(); ++j)
        {
          if (!is_digit(token[j]))
          {
            fail("malformed decimal '" + token + "'");
          }
        }
        atom.kind = SExpr::Kind::Decimal;
      }
      else
      {
        fail("symbol may not start with a digit: '" + token + "'");
      }
      atom.text = std::move(token);
      return atom;
    }
    atom.kind = SExpr::Kind::Symbol;
    atom.text = std::move(token);
    return atom;
  }

  std::string_view text_;
  std::size_t max_depth_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

void render(const SExpr& e, std::string& out, std::size_t limit)
{
  if (out.size() > limit)
  {
    return;
  }
  switch (e.kind)
  {
    case SExpr::Kind::Symbol: out += e.quoted ? "|" + e.text + "|" : e.text; return;
    case SExpr::Kind::String: out += "\"" + e.text + "\""; return;
    case SExpr::Kind::List:
      out += "(";
      for (std::size_t i = 0; i < e.items.size(); ++i)
      {
        if (i > 0)
        {
          out += " ";
        }
        render(e.items[i], out, limit);
      }
      out += ")";
      return;
    default: out += e.text; return;
  }
}

}  // namespace

std::string SExpr::to_string(std::size_t limit) const
{
  std::string out;
  render(*this, out, limit);
  if (out.size() > limit)
  {
    out.resize(limit);
    out += "...";
  }
  return out;
}

std::vector<SExpr> read_sexprs(std::string_view text, std::size_t max_depth)
{
  return Reader(text, max_depth).read_all();
}

}  // namespace adteager
