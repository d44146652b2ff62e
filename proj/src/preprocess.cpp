#include "adteager/preprocess.h"

#include <cassert>
#include <map>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "adteager/error.h"

namespace adteager {

namespace {

bool is_application(TermKind kind)
{
  return kind == TermKind::Constructor || kind == TermKind::Selector ||
         kind == TermKind::Tester || kind == TermKind::Apply;
}

class IteRemover
{
 public:
  explicit IteRemover(TermManager& tm) : tm_(tm) {}

  Term rewrite(Term t)
  {
    if (t.args().empty())
    {
      return t;
    }
    if (auto it = memo_.find(t.id()); it != memo_.end())
    {
      return it->second;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (Term a : t.args())
    {
      args.push_back(rewrite(a));
    }
    Term result;
    switch (t.kind())
    {
      case TermKind::Ite:
        if (t.sort().is_bool())
        {
          result = tm_.mk_or({tm_.mk_and({args[0], args[1]}),
                              tm_.mk_and({tm_.mk_not(args[0]), args[2]})});
        }
        else
        {
          result = tm_.mk_fresh_var(kItePrefix, t.sort());
          side_.push_back(tm_.mk_implies(args[0], tm_.mk_eq(result, args[1])));
          side_.push_back(tm_.mk_implies(tm_.mk_not(args[0]), tm_.mk_eq(result, args[2])));
        }
        break;
      case TermKind::Constructor:
      case TermKind::Selector:
      case TermKind::Tester:
      case TermKind::Apply: result = tm_.mk_app_like(t, std::move(args)); break;
      case TermKind::Equal: result = tm_.mk_eq(args[0], args[1]); break;
      case TermKind::Distinct: result = tm_.mk_distinct(std::move(args)); break;
      case TermKind::Not: result = tm_.mk_not(args[0]); break;
      case TermKind::And: result = tm_.mk_and(std::move(args)); break;
      case TermKind::Or: result = tm_.mk_or(std::move(args)); break;
      case TermKind::Implies: result = tm_.mk_implies(args[0], args[1]); break;
      default: result = t; break;
    }
    memo_.emplace(t.id(), result);
    return result;
  }

  std::vector<Term> take_side_conditions() { return std::move(side_); }

 private:
  TermManager& tm_;
  std::unordered_map<std::uint32_t, Term> memo_;
  std::vector<Term> side_;
};

class Flattener
{
 public:
  explicit Flattener(FlatQuery& q) : q_(q), tm_(*q.terms) {}

  void run(const std::vector<Term>& assertions)
  {
    std::vector<std::size_t> conjuncts;
    for (Term a : assertions)
    {
      conjuncts.push_back(formula(a));
    }
    // Definitions of fresh variables hold unconditionally.
    for (std::size_t d : definitions_)
    {
      conjuncts.push_back(d);
    }
    q_.root = node(NodeKind::And, std::move(conjuncts));
  }

 private:
  using NodeKey = std::tuple<NodeKind, std::size_t, std::uint32_t, std::vector<std::size_t>>;
  using LiteralKey = std::tuple<LiteralKind, std::uint32_t, std::uint32_t>;

  std::size_t node(NodeKind kind, std::vector<std::size_t> children, std::size_t literal = 0,
                   Term var = Term())
  {
    NodeKey key{kind, literal, var ? var.id() : 0, children};
    if (auto it = nodes_.find(key); it != nodes_.end())
    {
      return it->second;
    }
    q_.nodes.push_back(SkeletonNode{kind, literal, var, std::move(children)});
    std::size_t id = q_.nodes.size() - 1;
    nodes_.emplace(std::move(key), id);
    return id;
  }

  std::size_t literal(LiteralKind kind, Term var, Term rhs)
  {
    LiteralKey key{kind, var ? var.id() : 0, rhs.id()};
    auto it = literals_.find(key);
    std::size_t index;
    if (it == literals_.end())
    {
      q_.literals.push_back(FlatLiteral{kind, var, rhs});
      index = q_.literals.size() - 1;
      literals_.emplace(key, index);
    }
    else
    {
      index = it->second;
    }
    return node(NodeKind::Literal, {}, index);
  }

  Term fresh(const Sort& sort)
  {
    ++q_.fresh_variables;
    return tm_.mk_fresh_var(kFlatPrefix, sort);
  }

  /// Application `t` with every argument replaced by a variable.
  Term flat_app(Term t)
  {
    if (auto it = apps_.find(t.id()); it != apps_.end())
    {
      return it->second;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (Term a : t.args())
    {
      args.push_back(name(a));
    }
    Term result = tm_.mk_app_like(t, std::move(args));
    apps_.emplace(t.id(), result);
    return result;
  }

  /// A variable equal to `t`, introducing and defining a fresh one unless
  /// `t` already is a variable.
  Term name(Term t)
  {
    if (t.kind() == TermKind::Variable)
    {
      return t;
    }
    if (t.kind() == TermKind::Ite)
    {
      throw Error(ErrorKind::Invalid, "preprocess", "flatten: ite must be desugared first");
    }
    if (auto it = names_.find(t.id()); it != names_.end())
    {
      return it->second;
    }
    Term v = fresh(t.sort());
    names_.emplace(t.id(), v);
    if (is_application(t.kind()))
    {
      definitions_.push_back(literal(LiteralKind::Def, v, flat_app(t)));
    }
    else
    {
      // A Boolean connective, equality or constant used as an argument.
      std::size_t rhs = formula(t);
      definitions_.push_back(node(NodeKind::Iff, {node(NodeKind::BoolVar, {}, 0, v), rhs}));
    }
    return v;
  }

  std::size_t equality(Term a, Term b, bool negated)
  {
    if (a.sort().is_bool())
    {
      std::size_t iff = node(NodeKind::Iff, {formula(a), formula(b)});
      return negated ? node(NodeKind::Not, {iff}) : iff;
    }
    std::size_t atom;
    if (a.is_var() && b.is_var())
    {
      return literal(negated ? LiteralKind::Neq : LiteralKind::Eq, a, b);
    }
    if (a.is_var())
    {
      atom = literal(LiteralKind::Def, a, flat_app(b));
    }
    else if (b.is_var())
    {
      atom = literal(LiteralKind::Def, b, flat_app(a));
    }
    else
    {
      atom = literal(LiteralKind::Def, name(a), flat_app(b));
    }
    return negated ? node(NodeKind::Not, {atom}) : atom;
  }

  std::size_t formula(Term f)
  {
    if (auto it = formulas_.find(f.id()); it != formulas_.end())
    {
      return it->second;
    }
    std::size_t result = 0;
    auto children = [&] {
      std::vector<std::size_t> out;
      for (Term a : f.args())
      {
        out.push_back(formula(a));
      }
      return out;
    };
    switch (f.kind())
    {
      case TermKind::True: result = node(NodeKind::True, {}); break;
      case TermKind::False: result = node(NodeKind::False, {}); break;
      case TermKind::Variable: result = node(NodeKind::BoolVar, {}, 0, f); break;
      case TermKind::Constructor:
      case TermKind::Selector:
      case TermKind::Tester:
      case TermKind::Apply: result = literal(LiteralKind::Pred, Term(), flat_app(f)); break;
      case TermKind::Equal: result = equality(f[0], f[1], false); break;
      case TermKind::Distinct:
      {
        std::vector<std::size_t> pairs;
        for (std::size_t i = 0; i < f.args().size(); ++i)
        {
          for (std::size_t j = i + 1; j < f.args().size(); ++j)
          {
            pairs.push_back(equality(f[i], f[j], true));
          }
        }
        result = node(NodeKind::And, std::move(pairs));
        break;
      }
      case TermKind::Not:
        if (f[0].kind() == TermKind::Equal)
        {
          result = equality(f[0][0], f[0][1], true);
        }
        else
        {
          result = node(NodeKind::Not, children());
        }
        break;
      case TermKind::And: result = node(NodeKind::And, children()); break;
      case TermKind::Or: result = node(NodeKind::Or, children()); break;
      case TermKind::Implies: result = node(NodeKind::Implies, children()); break;
      case TermKind::Ite:
        throw Error(ErrorKind::Invalid, "preprocess", "flatten: ite must be desugared first");
    }
    formulas_.emplace(f.id(), result);
    return result;
  }

  FlatQuery& q_;
  TermManager& tm_;
  std::map<NodeKey, std::size_t> nodes_;
  std::map<LiteralKey, std::size_t> literals_;
  std::unordered_map<std::uint32_t, Term> names_;
  std::unordered_map<std::uint32_t, Term> apps_;
  std::unordered_map<std::uint32_t, std::size_t> formulas_;
  std::vector<std::size_t> definitions_;
};

void collect_vars(Term t, std::unordered_set<std::uint32_t>& seen,
                  std::unordered_set<std::string>& out)
{
  if (!seen.insert(t.id()).second)
  {
    return;
  }
  if (t.is_var())
  {
    out.insert(t.symbol());
  }
  for (Term a : t.args())
  {
    collect_vars(a, seen, out);
  }
}

}  // namespace

std::vector<Term> FlatQuery::adt_vars() const
{
  std::vector<Term> out;
  for (Term v : vars)
  {
    if (v.sort().is_adt())
    {
      out.push_back(v);
    }
  }
  return out;
}

std::size_t count_application_nodes(const std::vector<Term>& roots)
{
  std::unordered_set<std::uint32_t> seen;
  std::vector<Term> stack(roots.begin(), roots.end());
  std::size_t count = 0;
  while (!stack.empty())
  {
    Term t = stack.back();
    stack.pop_back();
    if (!seen.insert(t.id()).second)
    {
      continue;
    }
    if (t.kind() != TermKind::Variable && t.kind() != TermKind::True &&
        t.kind() != TermKind::False)
    {
      ++count;
    }
    for (Term a : t.args())
    {
      stack.push_back(a);
    }
  }
  return count;
}

Script desugar_ite(const Script& script)
{
  Script out = script;
  IteRemover remover(*out.terms);
  out.assertions.clear();
  for (Term a : script.assertions)
  {
    out.assertions.push_back(remover.rewrite(a));
  }
  for (Term side : remover.take_side_conditions())
  {
    out.assertions.push_back(side);
  }
  return out;
}

FlatQuery flatten(const Script& script)
{
  FlatQuery q;
  q.terms = script.terms;
  q.application_nodes = count_application_nodes(script.assertions);
  Flattener(q).run(script.assertions);
  if (q.fresh_variables > q.application_nodes)
  {
    throw Error(ErrorKind::Invalid, "preprocess",
                "flatten introduced " + std::to_string(q.fresh_variables) +
                    " variables for " + std::to_string(q.application_nodes) + " applications");
  }

  std::unordered_set<std::uint32_t> seen;
  std::unordered_set<std::string> occurring;
  for (const FlatLiteral& lit : q.literals)
  {
    if (lit.var)
    {
      collect_vars(lit.var, seen, occurring);
    }
    collect_vars(lit.rhs, seen, occurring);
  }
  for (const SkeletonNode& n : q.nodes)
  {
    if (n.kind == NodeKind::BoolVar)
    {
      occurring.insert(n.var.symbol());
    }
  }
  for (const FunctionDecl& v : q.signature().variables())
  {
    if (occurring.count(v.name) != 0)
    {
      q.vars.push_back(q.terms->mk_var(v.name));
    }
  }
  return q;
}

Term literal_term(TermManager& tm, const FlatLiteral& literal)
{
  switch (literal.kind)
  {
    case LiteralKind::Eq:
    case LiteralKind::Def: return tm.mk_eq(literal.var, literal.rhs);
    case LiteralKind::Neq: return tm.mk_not(tm.mk_eq(literal.var, literal.rhs));
    case LiteralKind::Pred: return literal.rhs;
  }
  return literal.rhs;
}

Script to_script(const FlatQuery& query)
{
  TermManager& tm = *query.terms;
  std::vector<Term> built(query.nodes.size());
  for (std::size_t i = 0; i < query.nodes.size(); ++i)
  {
    const SkeletonNode& n = query.nodes[i];
    std::vector<Term> kids;
    for (std::size_t c : n.children)
    {
      kids.push_back(built[c]);
    }
    switch (n.kind)
    {
      case NodeKind::True: built[i] = tm.mk_true(); break;
      case NodeKind::False: built[i] = tm.mk_false(); break;
      case NodeKind::Literal: built[i] = literal_term(tm, query.literals[n.literal]); break;
      case NodeKind::BoolVar: built[i] = n.var; break;
      case NodeKind::Not: built[i] = tm.mk_not(kids[0]); break;
      case NodeKind::And: built[i] = tm.mk_and(std::move(kids)); break;
      case NodeKind::Or: built[i] = tm.mk_or(std::move(kids)); break;
      case NodeKind::Implies: built[i] = tm.mk_implies(kids[0], kids[1]); break;
      case NodeKind::Iff: built[i] = tm.mk_iff(kids[0], kids[1]); break;
    }
  }
  Script out;
  out.terms = query.terms;
  out.check_sat = true;
  const SkeletonNode& root = query.nodes[query.root];
  if (root.kind == NodeKind::And)
  {
    for (std::size_t c : root.children)
    {
      out.assertions.push_back(built[c]);
    }
  }
  else
  {
    out.assertions.push_back(built[query.root]);
  }
  return out;
}

}  // namespace adteager
