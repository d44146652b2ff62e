#include "adteager/ir.h"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "adteager/error.h"

namespace adteager {

namespace {

[[noreturn]] void sort_error(const std::string& message)
{
  throw Error(ErrorKind::Sort, "ir", message);
}

std::size_t hash_mix(std::size_t seed, std::size_t value)
{
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const std::set<std::string_view>& reserved_words()
{
  static const std::set<std::string_view> words = {
      "_",      "!",       "as",          "let",     "exists",
      "forall", "match",   "par",         "BINARY",  "DECIMAL",
      "HEXADECIMAL",       "NUMERAL",     "STRING"};
  return words;
}

bool is_simple_symbol_char(char c)
{
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
  {
    return true;
  }
  return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

}  // namespace

bool has_reserved_prefix(std::string_view name)
{
  return name.find(kReservedPrefix) != std::string_view::npos;
}

const std::string& Sort::name() const
{
  static const std::string kBool = "Bool";
  return kind_ == SortKind::Bool ? kBool : name_;
}

// ---------------------------------------------------------------------------
// AdtSignature

std::vector<std::string> uninhabited_datatypes(const std::vector<Datatype>& block)
{
  std::unordered_set<std::string> members;
  for (const Datatype& dt : block)
  {
    members.insert(dt.name);
  }
  std::unordered_set<std::string> inhabited;
  bool changed = true;
  while (changed)
  {
    changed = false;
    for (const Datatype& dt : block)
    {
      if (inhabited.count(dt.name) != 0)
      {
        continue;
      }
      for (const Constructor& c : dt.constructors)
      {
        bool ok = std::all_of(c.selectors.begin(), c.selectors.end(), [&](const Selector& s) {
          return !s.sort.is_adt() || members.count(s.sort.name()) == 0 ||
                 inhabited.count(s.sort.name()) != 0;
        });
        if (ok)
        {
          inhabited.insert(dt.name);
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<std::string> out;
  for (const Datatype& dt : block)
  {
    if (inhabited.count(dt.name) == 0)
    {
      out.push_back(dt.name);
    }
  }
  return out;
}

void AdtSignature::add_block(std::vector<Datatype> block)
{
  if (block.empty())
  {
    sort_error("empty datatype block");
  }
  std::unordered_set<std::string> names;
  std::unordered_set<std::string> functions;
  for (const Datatype& dt : block)
  {
    if (by_name_.count(dt.name) != 0 || !names.insert(dt.name).second)
    {
      sort_error("datatype '" + dt.name + "' declared twice");
    }
    if (dt.constructors.empty())
    {
      sort_error("datatype '" + dt.name + "' has no constructors");
    }
  }
  for (const Datatype& dt : block)
  {
    for (const Constructor& c : dt.constructors)
    {
      auto claim = [&](const std::string& name) {
        if (constructors_.count(name) != 0 || selectors_.count(name) != 0 ||
            !functions.insert(name).second)
        {
          sort_error("constructor or selector '" + name + "' declared twice");
        }
      };
      claim(c.name);
      for (const Selector& s : c.selectors)
      {
        claim(s.name);
        if (s.sort.is_adt() && by_name_.count(s.sort.name()) == 0 &&
            names.count(s.sort.name()) == 0)
        {
          sort_error("selector '" + s.name + "' refers to unknown datatype '" +
                     s.sort.name() + "'");
        }
      }
    }
  }
  std::vector<std::string> empty = uninhabited_datatypes(block);
  if (!empty.empty())
  {
    sort_error("datatype '" + empty.front() + "' is not inhabited by any finite value");
  }
  for (Datatype& dt : block)
  {
    std::size_t di = datatypes_.size();
    by_name_.emplace(dt.name, di);
    for (std::size_t ci = 0; ci < dt.constructors.size(); ++ci)
    {
      const Constructor& c = dt.constructors[ci];
      constructors_.emplace(c.name, ConstructorRef{di, ci});
      for (std::size_t si = 0; si < c.selectors.size(); ++si)
      {
        selectors_.emplace(c.selectors[si].name, SelectorRef{di, ci, si});
      }
    }
    datatypes_.push_back(std::move(dt));
  }
}

std::optional<std::size_t> AdtSignature::find(std::string_view name) const
{
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

const Datatype& AdtSignature::datatype(std::string_view name) const
{
  auto index = find(name);
  if (!index)
  {
    sort_error("unknown datatype '" + std::string(name) + "'");
  }
  return datatypes_[*index];
}

std::optional<ConstructorRef> AdtSignature::constructor(std::string_view name) const
{
  auto it = constructors_.find(std::string(name));
  if (it == constructors_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

std::optional<SelectorRef> AdtSignature::selector(std::string_view name) const
{
  auto it = selectors_.find(std::string(name));
  if (it == selectors_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

const Constructor& AdtSignature::constructor(ConstructorRef ref) const
{
  return datatypes_.at(ref.datatype).constructors.at(ref.index);
}

const Selector& AdtSignature::selector(SelectorRef ref) const
{
  return constructor_of(ref).selectors.at(ref.index);
}

const Constructor& AdtSignature::constructor_of(SelectorRef ref) const
{
  return datatypes_.at(ref.datatype).constructors.at(ref.constructor);
}

// ---------------------------------------------------------------------------
// Signature

void Signature::declare_sort(const std::string& name)
{
  if (name == "Bool" || has_sort(name))
  {
    sort_error("sort '" + name + "' declared twice");
  }
  sorts_.push_back(name);
}

void Signature::declare_datatypes(std::vector<Datatype> block)
{
  for (const Datatype& dt : block)
  {
    if (dt.name == "Bool" || has_sort(dt.name))
    {
      sort_error("sort '" + dt.name + "' declared twice");
    }
    for (const Constructor& c : dt.constructors)
    {
      if (symbols_.count(c.name) != 0)
      {
        sort_error("symbol '" + c.name + "' declared twice");
      }
      for (const Selector& s : c.selectors)
      {
        if (symbols_.count(s.name) != 0)
        {
          sort_error("symbol '" + s.name + "' declared twice");
        }
        if (s.sort.is_uninterpreted() &&
            std::find(sorts_.begin(), sorts_.end(), s.sort.name()) == sorts_.end())
        {
          sort_error("unknown sort '" + s.sort.name() + "'");
        }
      }
    }
  }
  std::vector<Datatype> copy = block;
  adts_.add_block(std::move(block));
  for (const Datatype& dt : copy)
  {
    for (const Constructor& c : dt.constructors)
    {
      symbols_.emplace(c.name, SymbolKind::Constructor);
      for (const Selector& s : c.selectors)
      {
        symbols_.emplace(s.name, SymbolKind::Selector);
      }
    }
  }
}

void Signature::claim_symbol(const std::string& name, SymbolKind kind)
{
  if (!symbols_.emplace(name, kind).second)
  {
    sort_error("symbol '" + name + "' declared twice");
  }
}

void Signature::declare_function(FunctionDecl decl)
{
  auto check = [&](const Sort& s) {
    if (s.is_bool())
    {
      return;
    }
    if (!resolve_sort(s.name()) || !(*resolve_sort(s.name()) == s))
    {
      sort_error("unknown sort '" + s.name() + "'");
    }
  };
  for (const Sort& s : decl.domain)
  {
    check(s);
  }
  check(decl.range);
  if (decl.domain.empty())
  {
    claim_symbol(decl.name, SymbolKind::Variable);
    variable_index_.emplace(decl.name, variables_.size());
    variables_.push_back(std::move(decl));
  }
  else
  {
    claim_symbol(decl.name, SymbolKind::Function);
    function_index_.emplace(decl.name, functions_.size());
    functions_.push_back(std::move(decl));
  }
}

bool Signature::has_sort(std::string_view name) const
{
  return std::find(sorts_.begin(), sorts_.end(), name) != sorts_.end() ||
         adts_.find(name).has_value();
}

std::optional<Sort> Signature::resolve_sort(std::string_view name) const
{
  if (name == "Bool")
  {
    return Sort::boolean();
  }
  if (std::find(sorts_.begin(), sorts_.end(), name) != sorts_.end())
  {
    return Sort::uninterpreted(std::string(name));
  }
  if (adts_.find(name))
  {
    return Sort::adt(std::string(name));
  }
  return std::nullopt;
}

std::optional<SymbolKind> Signature::symbol_kind(std::string_view name) const
{
  auto it = symbols_.find(std::string(name));
  if (it == symbols_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

const FunctionDecl* Signature::function(std::string_view name) const
{
  auto it = function_index_.find(std::string(name));
  return it == function_index_.end() ? nullptr : &functions_[it->second];
}

const FunctionDecl* Signature::variable(std::string_view name) const
{
  auto it = variable_index_.find(std::string(name));
  return it == variable_index_.end() ? nullptr : &variables_[it->second];
}

std::string Signature::fresh_name(std::string_view prefix)
{
  std::size_t& counter = fresh_counters_[std::string(prefix)];
  while (true)
  {
    std::string candidate = std::string(prefix) + std::to_string(counter++);
    if (symbols_.count(candidate) == 0)
    {
      return candidate;
    }
  }
}

// ---------------------------------------------------------------------------
// Term

std::uint32_t Term::id() const { return node_->id; }
TermKind Term::kind() const { return node_->kind; }
const Sort& Term::sort() const { return node_->sort; }
const std::string& Term::symbol() const { return node_->symbol; }
std::span<const Term> Term::args() const { return node_->args; }

std::size_t TermManager::KeyHash::operator()(const Key& key) const
{
  std::size_t h = std::hash<int>()(static_cast<int>(key.kind));
  h = hash_mix(h, std::hash<std::string>()(key.symbol));
  h = hash_mix(h, std::hash<std::string>()(key.sort.name()));
  for (std::uint32_t a : key.args)
  {
    h = hash_mix(h, a);
  }
  return h;
}

Term TermManager::intern(TermKind kind, std::string symbol, Sort sort, std::vector<Term> args)
{
  Key key{kind, symbol, sort, {}};
  key.args.reserve(args.size());
  for (Term a : args)
  {
    key.args.push_back(a.id());
  }
  auto it = table_.find(key);
  if (it != table_.end())
  {
    return it->second;
  }
  auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(TermNode{id, kind, std::move(symbol), std::move(sort), std::move(args)});
  Term t(&nodes_.back());
  table_.emplace(std::move(key), t);
  return t;
}

void TermManager::require_bool(Term t, std::string_view context) const
{
  if (!t.sort().is_bool())
  {
    sort_error(std::string(context) + " expects Bool arguments, got " + to_smtlib(t, 200) +
               " of sort " + t.sort().name());
  }
}

Term TermManager::mk_true() { return intern(TermKind::True, "true", Sort::boolean(), {}); }
Term TermManager::mk_false() { return intern(TermKind::False, "false", Sort::boolean(), {}); }

Term TermManager::mk_var(std::string_view name)
{
  const FunctionDecl* decl = signature_.variable(name);
  if (decl == nullptr)
  {
    sort_error("unknown variable '" + std::string(name) + "'");
  }
  return intern(TermKind::Variable, decl->name, decl->range, {});
}

Term TermManager::mk_fresh_var(std::string_view prefix, const Sort& sort)
{
  std::string name = signature_.fresh_name(prefix);
  signature_.declare_function(FunctionDecl{name, {}, sort});
  return mk_var(name);
}

Term TermManager::mk_app(std::string_view symbol, std::vector<Term> args)
{
  auto kind = signature_.symbol_kind(symbol);
  if (!kind)
  {
    sort_error("unknown symbol '" + std::string(symbol) + "'");
  }
  switch (*kind)
  {
    case SymbolKind::Variable:
      if (!args.empty())
      {
        sort_error("constant '" + std::string(symbol) + "' applied to arguments");
      }
      return mk_var(symbol);
    case SymbolKind::Function: return mk_apply(symbol, std::move(args));
    case SymbolKind::Constructor: return mk_constructor(symbol, std::move(args));
    case SymbolKind::Selector:
      if (args.size() != 1)
      {
        sort_error("selector '" + std::string(symbol) + "' expects one argument");
      }
      return mk_selector(symbol, args[0]);
  }
  sort_error("unknown symbol '" + std::string(symbol) + "'");
}

namespace {

std::string render_app(std::string_view symbol, const std::vector<Term>& args)
{
  std::string out = "(" + quote_symbol(symbol);
  for (Term a : args)
  {
    out += " " + to_smtlib(a, 200);
  }
  return out + ")";
}

}  // namespace

Term TermManager::mk_constructor(std::string_view name, std::vector<Term> args)
{
  const AdtSignature& adts = signature_.adts();
  auto ref = adts.constructor(name);
  if (!ref)
  {
    sort_error("unknown constructor '" + std::string(name) + "'");
  }
  const Constructor& c = adts.constructor(*ref);
  if (args.size() != c.arity())
  {
    sort_error("wrong number of arguments in " + render_app(name, args));
  }
  for (std::size_t i = 0; i < args.size(); ++i)
  {
    if (!(args[i].sort() == c.selectors[i].sort))
    {
      sort_error("argument " + std::to_string(i + 1) + " of " + render_app(name, args) +
                 " has sort " + args[i].sort().name() + ", expected " +
                 c.selectors[i].sort.name());
    }
  }
  return intern(TermKind::Constructor, c.name, Sort::adt(adts.datatype(ref->datatype).name),
                std::move(args));
}

Term TermManager::mk_selector(std::string_view name, Term arg)
{
  const AdtSignature& adts = signature_.adts();
  auto ref = adts.selector(name);
  if (!ref)
  {
    sort_error("unknown selector '" + std::string(name) + "'");
  }
  const std::string& dt = adts.datatype(ref->datatype).name;
  if (!(arg.sort() == Sort::adt(dt)))
  {
    sort_error("argument of " + render_app(name, {arg}) + " has sort " + arg.sort().name() +
               ", expected " + dt);
  }
  const Selector& s = adts.selector(*ref);
  return intern(TermKind::Selector, s.name, s.sort, {arg});
}

Term TermManager::mk_tester(std::string_view constructor, Term arg)
{
  const AdtSignature& adts = signature_.adts();
  auto ref = adts.constructor(constructor);
  if (!ref)
  {
    sort_error("tester of unknown constructor '" + std::string(constructor) + "'");
  }
  const std::string& dt = adts.datatype(ref->datatype).name;
  if (!(arg.sort() == Sort::adt(dt)))
  {
    sort_error("argument of tester is-" + std::string(constructor) + " " +
               to_smtlib(arg, 200) + " has sort " + arg.sort().name() + ", expected " + dt);
  }
  return intern(TermKind::Tester, std::string(constructor), Sort::boolean(), {arg});
}

Term TermManager::mk_apply(std::string_view function, std::vector<Term> args)
{
  const FunctionDecl* decl = signature_.function(function);
  if (decl == nullptr)
  {
    sort_error("unknown function '" + std::string(function) + "'");
  }
  if (args.size() != decl->domain.size())
  {
    sort_error("wrong number of arguments in " + render_app(function, args));
  }
  for (std::size_t i = 0; i < args.size(); ++i)
  {
    if (!(args[i].sort() == decl->domain[i]))
    {
      sort_error("argument " + std::to_string(i + 1) + " of " + render_app(function, args) +
                 " has sort " + args[i].sort().name() + ", expected " +
                 decl->domain[i].name());
    }
  }
  return intern(TermKind::Apply, decl->name, decl->range, std::move(args));
}

Term TermManager::mk_eq(Term a, Term b)
{
  if (!(a.sort() == b.sort()))
  {
    sort_error("equality between sorts " + a.sort().name() + " and " + b.sort().name() +
               " in " + render_app("=", {a, b}));
  }
  return intern(TermKind::Equal, "=", Sort::boolean(), {a, b});
}

Term TermManager::mk_distinct(std::vector<Term> args)
{
  if (args.size() < 2)
  {
    sort_error("distinct expects at least two arguments");
  }
  for (Term a : args)
  {
    if (!(a.sort() == args[0].sort()))
    {
      sort_error("distinct over mixed sorts in " + render_app("distinct", args));
    }
  }
  return intern(TermKind::Distinct, "distinct", Sort::boolean(), std::move(args));
}

Term TermManager::mk_not(Term a)
{
  require_bool(a, "not");
  return intern(TermKind::Not, "not", Sort::boolean(), {a});
}

Term TermManager::mk_and(std::vector<Term> args)
{
  if (args.empty())
  {
    return mk_true();
  }
  if (args.size() == 1)
  {
    require_bool(args[0], "and");
    return args[0];
  }
  for (Term a : args)
  {
    require_bool(a, "and");
  }
  return intern(TermKind::And, "and", Sort::boolean(), std::move(args));
}

Term TermManager::mk_or(std::vector<Term> args)
{
  if (args.empty())
  {
    return mk_false();
  }
  if (args.size() == 1)
  {
    require_bool(args[0], "or");
    return args[0];
  }
  for (Term a : args)
  {
    require_bool(a, "or");
  }
  return intern(TermKind::Or, "or", Sort::boolean(), std::move(args));
}

Term TermManager::mk_implies(Term a, Term b)
{
  require_bool(a, "=>");
  require_bool(b, "=>");
  return intern(TermKind::Implies, "=>", Sort::boolean(), {a, b});
}

Term TermManager::mk_ite(Term cond, Term then_term, Term else_term)
{
  require_bool(cond, "ite");
  if (!(then_term.sort() == else_term.sort()))
  {
    sort_error("ite branches have sorts " + then_term.sort().name() + " and " +
               else_term.sort().name());
  }
  Sort sort = then_term.sort();
  return intern(TermKind::Ite, "ite", std::move(sort), {cond, then_term, else_term});
}

Term TermManager::mk_app_like(Term t, std::vector<Term> args)
{
  switch (t.kind())
  {
    case TermKind::True:
    case TermKind::False:
    case TermKind::Variable: return t;
    case TermKind::Constructor: return mk_constructor(t.symbol(), std::move(args));
    case TermKind::Selector: return mk_selector(t.symbol(), args.at(0));
    case TermKind::Tester: return mk_tester(t.symbol(), args.at(0));
    case TermKind::Apply: return mk_apply(t.symbol(), std::move(args));
    case TermKind::Equal: return mk_eq(args.at(0), args.at(1));
    case TermKind::Distinct: return mk_distinct(std::move(args));
    case TermKind::Not: return mk_not(args.at(0));
    case TermKind::And: return mk_and(std::move(args));
    case TermKind::Or: return mk_or(std::move(args));
    case TermKind::Implies: return mk_implies(args.at(0), args.at(1));
    case TermKind::Ite: return mk_ite(args.at(0), args.at(1), args.at(2));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Rendering

std::string quote_symbol(std::string_view name)
{
  bool simple = !name.empty() && !(name[0] >= '0' && name[0] <= '9') &&
                reserved_words().count(name) == 0 &&
                std::all_of(name.begin(), name.end(), is_simple_symbol_char);
  if (simple)
  {
    return std::string(name);
  }
  return "|" + std::string(name) + "|";
}

namespace {

void render(Term t, std::string& out, std::size_t limit)
{
  if (out.size() >= limit)
  {
    return;
  }
  auto list = [&](std::string_view head) {
    out += "(";
    out += head;
    for (Term a : t.args())
    {
      out += " ";
      render(a, out, limit);
      if (out.size() >= limit)
      {
        return;
      }
    }
    out += ")";
  };
  switch (t.kind())
  {
    case TermKind::True: out += "true"; return;
    case TermKind::False: out += "false"; return;
    case TermKind::Variable: out += quote_symbol(t.symbol()); return;
    case TermKind::Constructor:
      if (t.args().empty())
      {
        out += quote_symbol(t.symbol());
        return;
      }
      list(quote_symbol(t.symbol()));
      return;
    case TermKind::Tester: list("(_ is " + quote_symbol(t.symbol()) + ")"); return;
    case TermKind::Selector:
    case TermKind::Apply: list(quote_symbol(t.symbol())); return;
    case TermKind::Equal:
    case TermKind::Distinct:
    case TermKind::Not:
    case TermKind::And:
    case TermKind::Or:
    case TermKind::Implies:
    case TermKind::Ite: list(t.symbol()); return;
  }
}

}  // namespace

std::string to_smtlib(Term t, std::size_t limit)
{
  std::string out;
  render(t, out, limit);
  if (out.size() >= limit)
  {
    out.resize(limit);
    out += "...";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal terms and selector chains

bool operator<(const NormalTerm& a, const NormalTerm& b)
{
  if (a.constructor != b.constructor)
  {
    return a.constructor < b.constructor;
  }
  return std::lexicographical_compare(a.children.begin(), a.children.end(), b.children.begin(),
                                      b.children.end());
}

std::size_t NormalTerm::depth() const
{
  std::size_t d = 0;
  for (const NormalTerm& c : children)
  {
    d = std::max(d, c.depth() + 1);
  }
  return d;
}

std::string NormalTerm::to_string() const
{
  if (children.empty())
  {
    return quote_symbol(constructor);
  }
  std::string out = "(" + quote_symbol(constructor);
  for (const NormalTerm& c : children)
  {
    out += " " + c.to_string();
  }
  return out + ")";
}

namespace {

void chain_dfs(const AdtSignature& adts, const Sort& sort, std::size_t max_length,
               std::vector<SelectorRef>& path,
               const std::function<bool(std::span<const SelectorRef>)>& visit)
{
  if (path.size() >= max_length || !sort.is_adt())
  {
    return;
  }
  auto di = adts.find(sort.name());
  if (!di)
  {
    return;
  }
  const Datatype& dt = adts.datatype(*di);
  for (std::size_t ci = 0; ci < dt.constructors.size(); ++ci)
  {
    const Constructor& c = dt.constructors[ci];
    for (std::size_t si = 0; si < c.selectors.size(); ++si)
    {
      path.push_back(SelectorRef{*di, ci, si});
      if (visit(path))
      {
        chain_dfs(adts, c.selectors[si].sort, max_length, path, visit);
      }
      path.pop_back();
    }
  }
}

}  // namespace

void for_each_selector_chain(const AdtSignature& adts, const Sort& start,
                             std::size_t max_length,
                             const std::function<bool(std::span<const SelectorRef>)>& visit)
{
  std::vector<SelectorRef> path;
  chain_dfs(adts, start, max_length, path, visit);
}

std::vector<SelectorChain> child_depth_terms(TermManager& tm, Term x, std::size_t length)
{
  std::vector<SelectorChain> out;
  if (length == 0)
  {
    return out;
  }
  const AdtSignature& adts = tm.signature().adts();
  for_each_selector_chain(adts, x.sort(), length, [&](std::span<const SelectorRef> path) {
    if (path.size() < length)
    {
      return true;
    }
    SelectorChain chain;
    Term current = x;
    for (const SelectorRef& ref : path)
    {
      chain.guards.push_back(tm.mk_tester(adts.constructor_of(ref).name, current));
      current = tm.mk_selector(adts.selector(ref).name, current);
    }
    chain.term = current;
    out.push_back(std::move(chain));
    return false;
  });
  return out;
}

}  // namespace adteager
