#include "adteager/frontend.h"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "adteager/error.h"
#include "sexpr.h"

namespace adteager {

namespace {

const std::set<std::string_view> kBuiltinFunctions = {
    "true", "false", "not", "and", "or", "=>", "xor", "=", "distinct", "ite"};

// Symbols of theories outside the accepted fragment; reported as
// unsupported rather than undeclared.
const std::set<std::string_view> kForeignFunctions = {
    "+",      "-",       "*",         "/",        "div",     "mod",      "abs",
    "<",      "<=",      ">",         ">=",       "to_real", "to_int",   "is_int",
    "select", "store",   "str.++",    "str.len",  "bvadd",   "bvsub",    "bvmul",
    "bvand",  "bvor",    "bvnot",     "concat",   "extract", "fp.add",   "seq.len"};

const std::set<std::string_view> kForeignSorts = {
    "Int", "Real", "String", "RegLan", "RoundingMode", "Float16", "Float32", "Float64",
    "Float128", "Array", "Seq", "Set", "BitVec", "FloatingPoint"};

const std::set<std::string_view> kUnsupportedCommands = {
    "push",           "pop",            "get-model",       "get-value",
    "get-assignment", "get-proof",      "get-unsat-core",  "get-unsat-assumptions",
    "check-sat-assuming",               "define-fun-rec",  "define-funs-rec",
    "define-sort",    "declare-codatatypes",               "declare-codatatype",
    "reset",          "reset-assertions",                  "echo",
    "get-assertions", "get-option",     "declare-heap",    "minimize",
    "maximize"};

struct Macro
{
  std::vector<std::pair<std::string, Sort>> params;
  Sort range;
  SExpr body;
  std::optional<Term> value;  // nullary macros are parsed once
  std::map<std::vector<std::uint32_t>, Term> memo;
};

class Parser
{
 public:
  explicit Parser(const ParseOptions& options) : options_(options) {}

  Script run(std::string_view text)
  {
    std::vector<SExpr> commands = read_sexprs(text, options_.max_depth);
    for (const SExpr& command : commands)
    {
      if (exited_)
      {
        break;
      }
      run_command(command);
    }
    return std::move(script_);
  }

 private:
  // -- diagnostics ---------------------------------------------------------

  [[noreturn]] static void fail(ErrorKind kind, const SExpr& at, const std::string& message)
  {
    throw Error(kind, "frontend", message, at.line, at.column);
  }
  [[noreturn]] static void syntax(const SExpr& at, const std::string& message)
  {
    fail(ErrorKind::Syntax, at, message);
  }
  [[noreturn]] static void sort_error(const SExpr& at, const std::string& message)
  {
    fail(ErrorKind::Sort, at, message);
  }
  [[noreturn]] static void unsupported(const SExpr& at, const std::string& message)
  {
    fail(ErrorKind::Unsupported, at, message);
  }

  /// Runs a term-manager call, attaching the source position to any error
  /// it raises.
  template <typename F>
  Term located(const SExpr& at, F&& build)
  {
    try
    {
      return build();
    }
    catch (const Error& e)
    {
      if (e.line() != 0)
      {
        throw;
      }
      std::string message = e.what();
      std::string prefix = std::string("ir: ") + to_string(e.kind()) + ": ";
      if (message.rfind(prefix, 0) == 0)
      {
        message = message.substr(prefix.size());
      }
      throw Error(e.kind(), "frontend", message, at.line, at.column);
    }
  }

  TermManager& tm() { return *active_; }

  // -- names ---------------------------------------------------------------

  const std::string& name_of(const SExpr& e, std::string_view what)
  {
    if (!e.is_symbol())
    {
      syntax(e, std::string("expected ") + std::string(what) + " symbol, got " + e.to_string());
    }
    if (!options_.allow_reserved_symbols && has_reserved_prefix(e.text))
    {
      sort_error(e, "symbol '" + e.text + "' uses the reserved prefix " +
                        std::string(kReservedPrefix));
    }
    return e.text;
  }

  const std::string& declared_name(const SExpr& e, std::string_view what)
  {
    const std::string& name = name_of(e, what);
    if (!e.quoted && kBuiltinFunctions.count(name) != 0)
    {
      sort_error(e, "cannot redeclare builtin '" + name + "'");
    }
    if (tm().signature().symbol_kind(name) || macros_.count(name) != 0)
    {
      sort_error(e, "symbol '" + name + "' declared twice");
    }
    return name;
  }

  // -- sorts ---------------------------------------------------------------

  Sort parse_sort(const SExpr& e, const std::set<std::string>& pending = {})
  {
    if (e.is_list())
    {
      if (!e.items.empty() && e.items[0].is_symbol("_"))
      {
        unsupported(e, "indexed sort " + e.to_string());
      }
      if (!e.items.empty() && e.items[0].is_symbol() &&
          kForeignSorts.count(e.items[0].text) != 0)
      {
        unsupported(e, "sort " + e.to_string() + " of a non-datatype theory");
      }
      unsupported(e, "parametric sort " + e.to_string());
    }
    if (!e.is_symbol())
    {
      syntax(e, "expected sort, got " + e.to_string());
    }
    if (pending.count(e.text) != 0)
    {
      return Sort::adt(e.text);
    }
    if (auto sort = tm().signature().resolve_sort(e.text))
    {
      return *sort;
    }
    if (kForeignSorts.count(e.text) != 0)
    {
      unsupported(e, "sort " + e.text + " of a non-datatype theory");
    }
    sort_error(e, "unknown sort '" + e.text + "'");
  }

  // -- commands ------------------------------------------------------------

  void run_command(const SExpr& c)
  {
    if (!c.is_list() || c.items.empty() || !c.items[0].is_symbol())
    {
      syntax(c, "expected a command, got " + c.to_string());
    }
    const std::string& head = c.items[0].text;
    auto arity = [&](std::size_t n) {
      if (c.items.size() != n + 1)
      {
        syntax(c, "'" + head + "' expects " + std::to_string(n) + " argument(s)");
      }
    };
    if (head == "set-logic")
    {
      arity(1);
      const std::string& logic = name_of(c.items[1], "logic");
      script_.logic = logic;
      if (logic != "QF_DT" && logic != "QF_UFDT")
      {
        script_.warnings.push_back("logic " + logic +
                                   " is not QF_DT or QF_UFDT; accepting content as-is");
      }
    }
    else if (head == "set-info" || head == "set-option")
    {
      if (c.items.size() < 2 || c.items[1].kind != SExpr::Kind::Keyword)
      {
        syntax(c, "'" + head + "' expects a keyword");
      }
    }
    else if (head == "get-info")
    {
      arity(1);
    }
    else if (head == "declare-sort")
    {
      if (c.items.size() != 2 && c.items.size() != 3)
      {
        syntax(c, "'declare-sort' expects a name and an optional arity");
      }
      if (c.items.size() == 3 &&
          (c.items[2].kind != SExpr::Kind::Numeral || c.items[2].text != "0"))
      {
        unsupported(c, "sort constructors of non-zero arity");
      }
      const std::string& name = name_of(c.items[1], "sort");
      if (tm().signature().has_sort(name) || name == "Bool")
      {
        sort_error(c.items[1], "sort '" + name + "' declared twice");
      }
      tm().signature().declare_sort(name);
    }
    else if (head == "declare-datatype")
    {
      arity(2);
      const std::string& name = name_of(c.items[1], "datatype");
      std::set<std::string> pending{name};
      check_new_sort(c.items[1], name);
      Datatype dt = parse_datatype_body(name, c.items[2], pending);
      declare_block(c, {std::move(dt)});
    }
    else if (head == "declare-datatypes")
    {
      arity(2);
      declare_datatypes(c);
    }
    else if (head == "declare-const")
    {
      arity(2);
      const std::string& name = declared_name(c.items[1], "constant");
      Sort sort = parse_sort(c.items[2]);
      tm().signature().declare_function(FunctionDecl{name, {}, sort});
    }
    else if (head == "declare-fun")
    {
      arity(3);
      const std::string& name = declared_name(c.items[1], "function");
      if (!c.items[2].is_list())
      {
        syntax(c.items[2], "expected a list of argument sorts");
      }
      FunctionDecl decl{name, {}, parse_sort(c.items[3])};
      for (const SExpr& s : c.items[2].items)
      {
        decl.domain.push_back(parse_sort(s));
      }
      tm().signature().declare_function(std::move(decl));
    }
    else if (head == "define-fun")
    {
      arity(4);
      define_fun(c);
    }
    else if (head == "assert")
    {
      arity(1);
      Term t = parse_term(c.items[1]);
      if (!t.sort().is_bool())
      {
        sort_error(c.items[1], "assertion has sort " + t.sort().name() + ", expected Bool");
      }
      script_.assertions.push_back(t);
    }
    else if (head == "check-sat")
    {
      arity(0);
      if (script_.check_sat)
      {
        unsupported(c, "multiple check-sat commands");
      }
      script_.check_sat = true;
    }
    else if (head == "exit")
    {
      arity(0);
      exited_ = true;
    }
    else if (kUnsupportedCommands.count(head) != 0)
    {
      unsupported(c, "command '" + head + "'");
    }
    else
    {
      syntax(c, "unknown command '" + head + "'");
    }
  }

  void check_new_sort(const SExpr& at, const std::string& name)
  {
    if (name == "Bool" || tm().signature().has_sort(name))
    {
      sort_error(at, "sort '" + name + "' declared twice");
    }
  }

  void declare_block(const SExpr& at, std::vector<Datatype> block)
  {
    for (const Datatype& dt : block)
    {
      for (const Constructor& ctor : dt.constructors)
      {
        if (macros_.count(ctor.name) != 0)
        {
          sort_error(at, "symbol '" + ctor.name + "' declared twice");
        }
        for (const Selector& s : ctor.selectors)
        {
          if (macros_.count(s.name) != 0)
          {
            sort_error(at, "symbol '" + s.name + "' declared twice");
          }
        }
      }
    }
    located(at, [&] {
      tm().signature().declare_datatypes(std::move(block));
      return Term();
    });
  }

  void declare_datatypes(const SExpr& c)
  {
    const SExpr& sorts = c.items[1];
    const SExpr& bodies = c.items[2];
    if (!sorts.is_list() || !bodies.is_list())
    {
      syntax(c, "malformed declare-datatypes");
    }
    std::vector<Datatype> block;
    std::set<std::string> pending;
    if (sorts.items.empty())
    {
      // SMT-LIB 2.5 form: (declare-datatypes () ((name ctor ...) ...))
      for (const SExpr& d : bodies.items)
      {
        if (!d.is_list() || d.items.empty())
        {
          syntax(d, "malformed datatype declaration");
        }
        const std::string& name = name_of(d.items[0], "datatype");
        check_new_sort(d.items[0], name);
        if (!pending.insert(name).second)
        {
          sort_error(d.items[0], "datatype '" + name + "' declared twice");
        }
      }
      for (const SExpr& d : bodies.items)
      {
        SExpr ctors;
        ctors.kind = SExpr::Kind::List;
        ctors.line = d.line;
        ctors.column = d.column;
        ctors.items.assign(d.items.begin() + 1, d.items.end());
        block.push_back(parse_datatype_body(d.items[0].text, ctors, pending));
      }
    }
    else
    {
      if (sorts.items.size() != bodies.items.size())
      {
        syntax(c, "declare-datatypes: sort and body counts differ");
      }
      for (const SExpr& s : sorts.items)
      {
        if (!s.is_list() || s.items.size() != 2)
        {
          syntax(s, "expected (name arity)");
        }
        const std::string& name = name_of(s.items[0], "datatype");
        if (s.items[1].kind != SExpr::Kind::Numeral)
        {
          syntax(s.items[1], "expected numeral arity");
        }
        if (s.items[1].text != "0")
        {
          unsupported(s, "parametric datatype '" + name + "'");
        }
        check_new_sort(s.items[0], name);
        if (!pending.insert(name).second)
        {
          sort_error(s.items[0], "datatype '" + name + "' declared twice");
        }
      }
      for (std::size_t i = 0; i < sorts.items.size(); ++i)
      {
        block.push_back(parse_datatype_body(sorts.items[i].items[0].text, bodies.items[i], pending));
      }
    }
    if (block.empty())
    {
      syntax(c, "declare-datatypes declares nothing");
    }
    declare_block(c, std::move(block));
  }

  Datatype parse_datatype_body(const std::string& name, const SExpr& body,
                               const std::set<std::string>& pending)
  {
    if (!body.is_list())
    {
      syntax(body, "expected a list of constructor declarations");
    }
    if (!body.items.empty() && body.items[0].is_symbol("par"))
    {
      unsupported(body, "parametric datatype '" + name + "'");
    }
    Datatype dt{name, {}};
    for (const SExpr& c : body.items)
    {
      Constructor ctor;
      if (c.is_symbol())
      {
        ctor.name = declared_name(c, "constructor");
      }
      else
      {
        if (!c.is_list() || c.items.empty())
        {
          syntax(c, "malformed constructor declaration");
        }
        ctor.name = declared_name(c.items[0], "constructor");
        for (std::size_t i = 1; i < c.items.size(); ++i)
        {
          const SExpr& sel = c.items[i];
          if (!sel.is_list() || sel.items.size() != 2)
          {
            syntax(sel, "expected (selector sort)");
          }
          ctor.selectors.push_back(
              Selector{declared_name(sel.items[0], "selector"), parse_sort(sel.items[1], pending)});
        }
      }
      dt.constructors.push_back(std::move(ctor));
    }
    if (dt.constructors.empty())
    {
      sort_error(body, "datatype '" + name + "' has no constructors");
    }
    return dt;
  }

  static bool mentions(const SExpr& e, const std::string& name)
  {
    if (e.is_symbol())
    {
      return e.text == name;
    }
    return std::any_of(e.items.begin(), e.items.end(),
                       [&](const SExpr& i) { return mentions(i, name); });
  }

  void define_fun(const SExpr& c)
  {
    const std::string& name = declared_name(c.items[1], "function");
    if (!c.items[2].is_list())
    {
      syntax(c.items[2], "expected a parameter list");
    }
    if (mentions(c.items[4], name))
    {
      unsupported(c, "recursive define-fun '" + name + "'");
    }
    Macro macro;
    std::set<std::string> seen;
    for (const SExpr& p : c.items[2].items)
    {
      if (!p.is_list() || p.items.size() != 2)
      {
        syntax(p, "expected (parameter sort)");
      }
      const std::string& pname = name_of(p.items[0], "parameter");
      if (!seen.insert(pname).second)
      {
        sort_error(p.items[0], "duplicate parameter '" + pname + "'");
      }
      macro.params.emplace_back(pname, parse_sort(p.items[1]));
    }
    macro.range = parse_sort(c.items[3]);
    macro.body = c.items[4];

    // Type-check the body once. Nullary bodies are kept; others are checked
    // against placeholder parameters in a scratch manager and re-parsed at
    // each use.
    std::vector<std::unordered_map<std::string, Term>> saved_scopes;
    std::swap(saved_scopes, scopes_);
    Term body;
    if (macro.params.empty())
    {
      body = parse_term(macro.body);
    }
    else
    {
      TermManager scratch(tm().signature());
      TermManager* saved = active_;
      active_ = &scratch;
      scopes_.emplace_back();
      try
      {
        for (const auto& [pname, psort] : macro.params)
        {
          scopes_.back()[pname] = scratch.mk_fresh_var("algb!param!", psort);
        }
        body = parse_term(macro.body);
      }
      catch (...)
      {
        active_ = saved;
        std::swap(saved_scopes, scopes_);
        throw;
      }
      active_ = saved;
      scopes_.clear();
    }
    std::swap(saved_scopes, scopes_);
    if (!(body.sort() == macro.range))
    {
      sort_error(c.items[4], "body of '" + name + "' has sort " + body.sort().name() +
                                 ", declared " + macro.range.name());
    }
    if (macro.params.empty())
    {
      macro.value = body;
    }
    macros_.emplace(name, std::move(macro));
  }

  Term expand_macro(const SExpr& at, const std::string& name, std::vector<Term> args)
  {
    Macro& macro = macros_.at(name);
    if (args.size() != macro.params.size())
    {
      sort_error(at, "'" + name + "' expects " + std::to_string(macro.params.size()) +
                         " argument(s)");
    }
    if (macro.value)
    {
      return *macro.value;
    }
    std::vector<std::uint32_t> key;
    for (std::size_t i = 0; i < args.size(); ++i)
    {
      if (!(args[i].sort() == macro.params[i].second))
      {
        sort_error(at, "argument " + std::to_string(i + 1) + " of '" + name + "' has sort " +
                           args[i].sort().name() + ", expected " +
                           macro.params[i].second.name());
      }
      key.push_back(args[i].id());
    }
    if (auto it = macro.memo.find(key); it != macro.memo.end())
    {
      return it->second;
    }
    std::vector<std::unordered_map<std::string, Term>> saved;
    std::swap(saved, scopes_);
    scopes_.emplace_back();
    for (std::size_t i = 0; i < args.size(); ++i)
    {
      scopes_.back()[macro.params[i].first] = args[i];
    }
    Term result;
    try
    {
      result = parse_term(macro.body);
    }
    catch (...)
    {
      std::swap(saved, scopes_);
      throw;
    }
    std::swap(saved, scopes_);
    macro.memo.emplace(std::move(key), result);
    return result;
  }

  // -- terms ---------------------------------------------------------------

  std::optional<Term> lookup_local(const std::string& name) const
  {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
    {
      auto found = it->find(name);
      if (found != it->end())
      {
        return found->second;
      }
    }
    return std::nullopt;
  }

  /// Constructor named by a legacy `is-C` tester symbol, if any.
  std::optional<std::string> legacy_tester(const std::string& name) const
  {
    if (name.rfind("is-", 0) != 0 || tm_const().signature().symbol_kind(name))
    {
      return std::nullopt;
    }
    std::string ctor = name.substr(3);
    if (tm_const().signature().adts().constructor(ctor))
    {
      return ctor;
    }
    return std::nullopt;
  }

  const TermManager& tm_const() const { return *active_; }

  Term parse_symbol_term(const SExpr& e)
  {
    const std::string& name = e.text;
    if (!options_.allow_reserved_symbols && has_reserved_prefix(name) && !lookup_local(name))
    {
      sort_error(e, "symbol '" + name + "' uses the reserved prefix " +
                        std::string(kReservedPrefix));
    }
    if (auto local = lookup_local(name))
    {
      return *local;
    }
    if (macros_.count(name) != 0)
    {
      return expand_macro(e, name, {});
    }
    if (!e.quoted && name == "true")
    {
      return tm().mk_true();
    }
    if (!e.quoted && name == "false")
    {
      return tm().mk_false();
    }
    auto kind = tm().signature().symbol_kind(name);
    if (kind == SymbolKind::Variable)
    {
      return tm().mk_var(name);
    }
    if (kind == SymbolKind::Constructor)
    {
      return located(e, [&] { return tm().mk_constructor(name, {}); });
    }
    if (kind)
    {
      sort_error(e, "function '" + name + "' used without arguments");
    }
    if (kForeignFunctions.count(name) != 0)
    {
      unsupported(e, "symbol '" + name + "' of a non-datatype theory");
    }
    sort_error(e, "unknown symbol '" + name + "'");
  }

  std::vector<Term> parse_args(const SExpr& e, std::size_t from)
  {
    std::vector<Term> args;
    args.reserve(e.items.size() - from);
    for (std::size_t i = from; i < e.items.size(); ++i)
    {
      args.push_back(parse_term(e.items[i]));
    }
    return args;
  }

  Term parse_term(const SExpr& e)
  {
    switch (e.kind)
    {
      case SExpr::Kind::Symbol: return parse_symbol_term(e);
      case SExpr::Kind::Numeral:
      case SExpr::Kind::Decimal: unsupported(e, "arithmetic literal " + e.text);
      case SExpr::Kind::Hexadecimal:
      case SExpr::Kind::Binary: unsupported(e, "bit-vector literal " + e.text);
      case SExpr::Kind::String: unsupported(e, "string literal");
      case SExpr::Kind::Keyword: syntax(e, "unexpected keyword " + e.text);
      case SExpr::Kind::List: break;
    }
    if (e.items.empty())
    {
      syntax(e, "empty application");
    }
    const SExpr& head = e.items[0];
    if (head.is_list())
    {
      return parse_indexed_application(e);
    }
    if (!head.is_symbol())
    {
      syntax(head, "expected function symbol, got " + head.to_string());
    }
    const std::string& op = head.text;
    std::size_t n = e.items.size() - 1;
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (n < lo || n > hi)
      {
        sort_error(e, "wrong number of arguments to '" + op + "'");
      }
    };
    if (!head.quoted)
    {
      if (op == "let")
      {
        return parse_let(e);
      }
      if (op == "forall" || op == "exists")
      {
        unsupported(e, "quantifier '" + op + "'");
      }
      if (op == "lambda")
      {
        unsupported(e, "lambda");
      }
      if (op == "match")
      {
        return parse_match(e);
      }
      if (op == "!")
      {
        return parse_annotation(e);
      }
      if (op == "_")
      {
        unsupported(e, "indexed identifier " + e.to_string());
      }
      if (op == "as")
      {
        need(2, 2);
        Term t = parse_term(e.items[1]);
        Sort expected = parse_sort(e.items[2]);
        if (!(t.sort() == expected))
        {
          sort_error(e, "term has sort " + t.sort().name() + ", annotated " + expected.name());
        }
        return t;
      }
      if (op == "not")
      {
        need(1, 1);
        Term a = parse_term(e.items[1]);
        return located(e, [&] { return tm().mk_not(a); });
      }
      if (op == "and" || op == "or")
      {
        need(1, SIZE_MAX);
        std::vector<Term> args = parse_args(e, 1);
        return located(e, [&] {
          return op == "and" ? tm().mk_and(std::move(args)) : tm().mk_or(std::move(args));
        });
      }
      if (op == "=>")
      {
        need(2, SIZE_MAX);
        std::vector<Term> args = parse_args(e, 1);
        return located(e, [&] {
          Term acc = args.back();
          for (std::size_t i = args.size() - 1; i-- > 0;)
          {
            acc = tm().mk_implies(args[i], acc);
          }
          return acc;
        });
      }
      if (op == "xor")
      {
        need(2, SIZE_MAX);
        std::vector<Term> args = parse_args(e, 1);
        return located(e, [&] {
          Term acc = args[0];
          for (std::size_t i = 1; i < args.size(); ++i)
          {
            if (!acc.sort().is_bool() || !args[i].sort().is_bool())
            {
              return tm().mk_not(acc);  // raises the Bool sort error
            }
            acc = tm().mk_not(tm().mk_eq(acc, args[i]));
          }
          return acc;
        });
      }
      if (op == "=")
      {
        need(2, SIZE_MAX);
        std::vector<Term> args = parse_args(e, 1);
        return located(e, [&] {
          std::vector<Term> links;
          for (std::size_t i = 0; i + 1 < args.size(); ++i)
          {
            links.push_back(tm().mk_eq(args[i], args[i + 1]));
          }
          return tm().mk_and(std::move(links));
        });
      }
      if (op == "distinct")
      {
        need(2, SIZE_MAX);
        std::vector<Term> args = parse_args(e, 1);
        return located(e, [&] { return tm().mk_distinct(std::move(args)); });
      }
      if (op == "ite")
      {
        need(3, 3);
        std::vector<Term> args = parse_args(e, 1);
        return located(e, [&] { return tm().mk_ite(args[0], args[1], args[2]); });
      }
    }
    if (!options_.allow_reserved_symbols && has_reserved_prefix(op))
    {
      sort_error(head, "symbol '" + op + "' uses the reserved prefix " +
                           std::string(kReservedPrefix));
    }
    if (lookup_local(op))
    {
      sort_error(head, "bound variable '" + op + "' applied to arguments");
    }
    if (macros_.count(op) != 0)
    {
      std::vector<Term> args = parse_args(e, 1);
      return expand_macro(e, op, std::move(args));
    }
    if (tm().signature().symbol_kind(op))
    {
      std::vector<Term> args = parse_args(e, 1);
      return located(e, [&] { return tm().mk_app(op, std::move(args)); });
    }
    if (auto ctor = legacy_tester(op))
    {
      need(1, 1);
      Term arg = parse_term(e.items[1]);
      return located(e, [&] { return tm().mk_tester(*ctor, arg); });
    }
    if (kForeignFunctions.count(op) != 0)
    {
      unsupported(head, "function '" + op + "' of a non-datatype theory");
    }
    sort_error(head, "unknown function '" + op + "'");
  }

  Term parse_indexed_application(const SExpr& e)
  {
    const SExpr& head = e.items[0];
    if (head.items.size() == 3 && head.items[0].is_symbol("_") && head.items[1].is_symbol("is"))
    {
      if (e.items.size() != 2)
      {
        sort_error(e, "tester expects one argument");
      }
      const std::string& ctor = name_of(head.items[2], "constructor");
      Term arg = parse_term(e.items[1]);
      return located(e, [&] { return tm().mk_tester(ctor, arg); });
    }
    if (head.items.size() == 3 && head.items[0].is_symbol("as"))
    {
      const std::string& name = name_of(head.items[1], "function");
      Sort expected = parse_sort(head.items[2]);
      std::vector<Term> args = parse_args(e, 1);
      Term t = located(e, [&] { return tm().mk_app(name, std::move(args)); });
      if (!(t.sort() == expected))
      {
        sort_error(e, "term has sort " + t.sort().name() + ", annotated " + expected.name());
      }
      return t;
    }
    if (!head.items.empty() && head.items[0].is_symbol("_"))
    {
      unsupported(head, "indexed function " + head.to_string());
    }
    syntax(head, "expected function symbol, got " + head.to_string());
  }

  Term parse_annotation(const SExpr& e)
  {
    if (e.items.size() < 2)
    {
      syntax(e, "empty annotation");
    }
    for (std::size_t i = 2; i < e.items.size(); ++i)
    {
      if (e.items[i].kind == SExpr::Kind::Keyword)
      {
        continue;
      }
      if (i > 2 && e.items[i - 1].kind == SExpr::Kind::Keyword)
      {
        continue;
      }
      syntax(e.items[i], "malformed attribute");
    }
    return parse_term(e.items[1]);
  }

  Term parse_let(const SExpr& e)
  {
    if (e.items.size() != 3 || !e.items[1].is_list())
    {
      syntax(e, "malformed let");
    }
    std::unordered_map<std::string, Term> bindings;
    for (const SExpr& b : e.items[1].items)
    {
      if (!b.is_list() || b.items.size() != 2)
      {
        syntax(b, "expected (symbol term) binding");
      }
      const std::string& name = name_of(b.items[0], "let-bound");
      Term value = parse_term(b.items[1]);
      if (!bindings.emplace(name, value).second)
      {
        sort_error(b.items[0], "duplicate let binding '" + name + "'");
      }
    }
    if (e.items[1].items.empty())
    {
      syntax(e, "let without bindings");
    }
    scopes_.push_back(std::move(bindings));
    Term body;
    try
    {
      body = parse_term(e.items[2]);
    }
    catch (...)
    {
      scopes_.pop_back();
      throw;
    }
    scopes_.pop_back();
    return body;
  }

  Term parse_match(const SExpr& e)
  {
    if (e.items.size() != 3 || !e.items[2].is_list() || e.items[2].items.empty())
    {
      syntax(e, "malformed match");
    }
    Term scrutinee = parse_term(e.items[1]);
    if (!scrutinee.sort().is_adt())
    {
      sort_error(e.items[1], "match on non-datatype sort " + scrutinee.sort().name());
    }
    const AdtSignature& adts = tm().signature().adts();
    const Datatype& dt = adts.datatype(scrutinee.sort().name());

    struct Case
    {
      std::optional<std::string> constructor;  // nullopt: catch-all
      Term body;
    };
    std::vector<Case> cases;
    std::set<std::string> covered;
    bool exhaustive = false;
    for (const SExpr& c : e.items[2].items)
    {
      if (!c.is_list() || c.items.size() != 2)
      {
        syntax(c, "expected (pattern term) match case");
      }
      if (exhaustive)
      {
        break;  // unreachable case
      }
      const SExpr& pattern = c.items[0];
      std::unordered_map<std::string, Term> bindings;
      std::optional<std::string> ctor_name;
      if (pattern.is_symbol())
      {
        auto ref = adts.constructor(pattern.text);
        if (ref && ref->datatype == *adts.find(dt.name))
        {
          if (!adts.constructor(*ref).is_constant())
          {
            sort_error(pattern, "constructor '" + pattern.text + "' used without arguments");
          }
          ctor_name = pattern.text;
        }
        else
        {
          bindings.emplace(name_of(pattern, "pattern variable"), scrutinee);
        }
      }
      else if (pattern.is_list() && !pattern.items.empty())
      {
        const std::string& name = name_of(pattern.items[0], "constructor");
        auto ref = adts.constructor(name);
        if (!ref || ref->datatype != *adts.find(dt.name))
        {
          sort_error(pattern.items[0],
                     "'" + name + "' is not a constructor of " + dt.name);
        }
        const Constructor& ctor = adts.constructor(*ref);
        if (ctor.arity() != pattern.items.size() - 1)
        {
          sort_error(pattern, "pattern for '" + name + "' has wrong arity");
        }
        for (std::size_t i = 1; i < pattern.items.size(); ++i)
        {
          if (pattern.items[i].is_list())
          {
            unsupported(pattern.items[i], "nested constructor pattern");
          }
          const std::string& var = name_of(pattern.items[i], "pattern variable");
          Term sel = tm().mk_selector(ctor.selectors[i - 1].name, scrutinee);
          if (!bindings.emplace(var, sel).second)
          {
            sort_error(pattern.items[i], "duplicate pattern variable '" + var + "'");
          }
        }
        ctor_name = name;
      }
      else
      {
        syntax(pattern, "malformed pattern");
      }
      if (ctor_name && !covered.insert(*ctor_name).second)
      {
        continue;  // shadowed by an earlier case
      }
      scopes_.push_back(std::move(bindings));
      Term body;
      try
      {
        body = parse_term(c.items[1]);
      }
      catch (...)
      {
        scopes_.pop_back();
        throw;
      }
      scopes_.pop_back();
      cases.push_back(Case{ctor_name, body});
      if (!ctor_name || covered.size() == dt.constructors.size())
      {
        exhaustive = true;
      }
    }
    if (!exhaustive)
    {
      sort_error(e, "non-exhaustive match on " + dt.name);
    }
    Term result = cases.back().body;
    for (std::size_t i = cases.size() - 1; i-- > 0;)
    {
      Term cond = tm().mk_tester(*cases[i].constructor, scrutinee);
      result = located(e, [&] { return tm().mk_ite(cond, cases[i].body, result); });
    }
    return result;
  }

  ParseOptions options_;
  Script script_;
  TermManager* active_ = script_.terms.get();
  std::vector<std::unordered_map<std::string, Term>> scopes_;
  std::unordered_map<std::string, Macro> macros_;
  bool exited_ = false;
};

// ---------------------------------------------------------------------------
// Printer

constexpr std::size_t kShareThreshold = 4;

class UfPrinter
{
 public:
  explicit UfPrinter(const Script& script) : script_(script) {}

  std::string run()
  {
    const Signature& sig = script_.signature();
    if (!sig.adts().empty())
    {
      throw Error(ErrorKind::Invalid, "frontend", "print_uf_script: script declares datatypes");
    }
    analyse();
    std::string out = "(set-logic QF_UF)\n";
    for (const std::string& s : sig.uninterpreted_sorts())
    {
      out += "(declare-sort " + quote_symbol(s) + " 0)\n";
    }
    auto declare = [&](const FunctionDecl& f) {
      out += "(declare-fun " + quote_symbol(f.name) + " (";
      for (std::size_t i = 0; i < f.domain.size(); ++i)
      {
        out += (i > 0 ? " " : "") + quote_symbol(f.domain[i].name());
      }
      out += ") " + quote_symbol(f.range.name()) + ")\n";
    };
    for (const FunctionDecl& f : sig.functions())
    {
      declare(f);
    }
    for (const FunctionDecl& v : sig.variables())
    {
      declare(v);
    }
    for (Term t : shared_order_)
    {
      const std::string& name = names_.at(t.id());
      out += "(define-fun " + quote_symbol(name) + " () " + quote_symbol(t.sort().name()) + " ";
      print(t, out, /*allow_name=*/false);
      out += ")\n";
    }
    for (Term a : script_.assertions)
    {
      out += "(assert ";
      print(a, out, true);
      out += ")\n";
    }
    out += "(check-sat)\n";
    return out;
  }

 private:
  void analyse()
  {
    std::unordered_map<std::uint32_t, std::size_t> refs;
    std::unordered_map<std::uint32_t, std::size_t> sizes;
    std::vector<Term> post;  // post-order over the DAG
    std::unordered_set<std::uint32_t> visited;
    for (Term root : script_.assertions)
    {
      ++refs[root.id()];
      if (visited.count(root.id()) != 0)
      {
        continue;
      }
      std::vector<std::pair<Term, std::size_t>> stack{{root, 0}};
      visited.insert(root.id());
      while (!stack.empty())
      {
        auto& [t, next] = stack.back();
        if (next < t.args().size())
        {
          Term child = t.args()[next++];
          ++refs[child.id()];
          if (visited.insert(child.id()).second)
          {
            stack.emplace_back(child, 0);
          }
          continue;
        }
        std::size_t size = 1;
        for (Term c : t.args())
        {
          size = std::min<std::size_t>(size + sizes[c.id()], 1U << 30);
        }
        sizes[t.id()] = size;
        post.push_back(t);
        stack.pop_back();
      }
    }
    const Signature& sig = script_.signature();
    std::size_t counter = 0;
    for (Term t : post)
    {
      if (!t.args().empty() && refs[t.id()] >= 2 && sizes[t.id()] >= kShareThreshold)
      {
        std::string name;
        do
        {
          name = "algb!s!" + std::to_string(counter++);
        } while (sig.symbol_kind(name));
        names_.emplace(t.id(), std::move(name));
        shared_order_.push_back(t);
      }
    }
  }

  void print(Term t, std::string& out, bool allow_name)
  {
    if (allow_name)
    {
      auto it = names_.find(t.id());
      if (it != names_.end())
      {
        out += quote_symbol(it->second);
        return;
      }
    }
    auto list = [&](std::string_view head) {
      out += "(";
      out += head;
      for (Term a : t.args())
      {
        out += " ";
        print(a, out, true);
      }
      out += ")";
    };
    switch (t.kind())
    {
      case TermKind::True: out += "true"; return;
      case TermKind::False: out += "false"; return;
      case TermKind::Variable: out += quote_symbol(t.symbol()); return;
      case TermKind::Apply: list(quote_symbol(t.symbol())); return;
      case TermKind::Constructor:
      case TermKind::Selector:
      case TermKind::Tester:
        throw Error(ErrorKind::Invalid, "frontend",
                    "print_uf_script: datatype operation " + to_smtlib(t, 200));
      default: list(t.symbol()); return;
    }
  }

  const Script& script_;
  std::unordered_map<std::uint32_t, std::string> names_;
  std::vector<Term> shared_order_;
};

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0)
  {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0)
  {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Script parse_script(std::string_view text, const ParseOptions& options)
{
  return Parser(options).run(text);
}

std::string print_uf_script(const Script& script) { return UfPrinter(script).run(); }

Verdict parse_backend_output(std::string_view text)
{
  std::size_t pos = 0;
  while (pos <= text.size())
  {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
    {
      end = text.size();
    }
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == ';')
    {
      if (end == text.size())
      {
        break;
      }
      continue;
    }
    Verdict v;
    if (line == "sat")
    {
      v.answer = Answer::Sat;
    }
    else if (line == "unsat")
    {
      v.answer = Answer::Unsat;
    }
    else
    {
      v.answer = Answer::Unknown;
      v.reason = std::string(line.substr(0, 500));
    }
    return v;
  }
  return Verdict{Answer::Unknown, "no output", 0.0, ""};
}

const char* to_string(Answer answer)
{
  switch (answer)
  {
    case Answer::Sat: return "sat";
    case Answer::Unsat: return "unsat";
    case Answer::Unknown: return "unknown";
  }
  return "unknown";
}

}  // namespace adteager
