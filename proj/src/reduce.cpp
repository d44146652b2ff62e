#include "adteager/reduce.h"

#include <algorithm>
#include <limits>
#include <set>

#include <json.hpp>

#include "adteager/error.h"

namespace adteager {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b)
{
  return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b)
{
  if (a == 0 || b == 0)
  {
    return 0;
  }
  return a > kSaturated / b ? kSaturated : a * b;
}

[[noreturn]] void resource_limit(const std::string& message)
{
  throw Error(ErrorKind::ResourceLimit, "reduce", message);
}

class UniverseBuilder
{
 public:
  UniverseBuilder(const AdtSignature& adts, const AdtGraph& graph, std::size_t cap)
      : adts_(adts), graph_(graph), cap_(cap)
  {
    info_.entries.resize(adts.datatypes().size());
    state_.assign(adts.datatypes().size(), 0);
  }

  UniverseInfo run()
  {
    for (std::size_t a = 0; a < info_.entries.size(); ++a)
    {
      visit(a);
    }
    return std::move(info_);
  }

 private:
  std::uint64_t sort_size(const Sort& s, bool& finite)
  {
    if (s.is_bool())
    {
      return 2;
    }
    if (s.is_uninterpreted())
    {
      finite = false;
      return 0;
    }
    std::size_t b = *adts_.find(s.name());
    visit(b);
    if (!info_.entries[b].finite)
    {
      finite = false;
      return 0;
    }
    return info_.entries[b].size;
  }

  const std::vector<NormalTerm>& values(const Sort& s)
  {
    static const std::vector<NormalTerm> booleans = {NormalTerm{"false", {}},
                                                     NormalTerm{"true", {}}};
    if (s.is_bool())
    {
      return booleans;
    }
    return info_.entries[*adts_.find(s.name())].enumeration;
  }

  void visit(std::size_t a)
  {
    if (state_[a] != 0)
    {
      return;
    }
    state_[a] = 1;
    const Datatype& dt = adts_.datatype(a);
    info_.entries[a].adt = dt.name;
    bool finite = !graph_.on_cycle(a);
    std::uint64_t size = 0;
    if (finite)
    {
      for (const Constructor& c : dt.constructors)
      {
        std::uint64_t product = 1;
        for (const Selector& s : c.selectors)
        {
          product = sat_mul(product, sort_size(s.sort, finite));
        }
        size = sat_add(size, product);
      }
    }
    UniverseEntry& e = info_.entries[a];
    e.finite = finite;
    e.size = finite ? size : 0;
    if (finite && size <= cap_)
    {
      for (const Constructor& c : dt.constructors)
      {
        std::vector<const std::vector<NormalTerm>*> domains;
        for (const Selector& s : c.selectors)
        {
          domains.push_back(&values(s.sort));
        }
        std::vector<std::size_t> index(domains.size(), 0);
        bool done = false;
        while (!done)
        {
          NormalTerm n{c.name, {}};
          for (std::size_t i = 0; i < domains.size(); ++i)
          {
            n.children.push_back((*domains[i])[index[i]]);
          }
          e.enumeration.push_back(std::move(n));
          done = true;
          for (std::size_t i = domains.size(); i-- > 0;)
          {
            if (++index[i] < domains[i]->size())
            {
              done = false;
              break;
            }
            index[i] = 0;
          }
        }
      }
      e.enumerated = true;
    }
    state_[a] = 2;
  }

  const AdtSignature& adts_;
  const AdtGraph& graph_;
  std::size_t cap_;
  UniverseInfo info_;
  std::vector<int> state_;
};

}  // namespace

const UniverseEntry& UniverseInfo::at(std::string_view adt) const
{
  for (const UniverseEntry& e : entries)
  {
    if (e.adt == adt)
    {
      return e;
    }
  }
  throw Error(ErrorKind::Invalid, "reduce", "no universe entry for '" + std::string(adt) + "'");
}

UniverseInfo universe_info(const AdtSignature& adts, const AdtGraph& graph,
                           std::size_t enumeration_cap)
{
  return UniverseBuilder(adts, graph, enumeration_cap).run();
}

std::string ReduceStats::to_json() const
{
  nlohmann::ordered_json j;
  j["variables"] = variables;
  j["skolems"] = skolems;
  j["axiom1"] = axiom1;
  j["axiom2"] = axiom2;
  j["axiom3"] = axiom3;
  j["universe-constants"] = universe_constants;
  return j.dump();
}

// ---------------------------------------------------------------------------

Reducer::Reducer(const FlatQuery& query, ReduceOptions options)
    : query_(query),
      options_(options),
      adts_(query.signature().adts()),
      graph_(build_graph(adts_)),
      universe_(universe_info(adts_, graph_, options.universe_cap)),
      uf_(std::make_shared<TermManager>())
{
  const Signature& sig = query.signature();
  Signature& out = uf_->signature();
  for (const std::string& s : sig.uninterpreted_sorts())
  {
    out.declare_sort(s);
  }
  for (const Datatype& dt : adts_.datatypes())
  {
    out.declare_sort(dt.name);
  }
  for (const Datatype& dt : adts_.datatypes())
  {
    Sort self = Sort::uninterpreted(dt.name);
    for (const Constructor& c : dt.constructors)
    {
      FunctionDecl decl{c.name, {}, self};
      for (const Selector& s : c.selectors)
      {
        decl.domain.push_back(map_sort(s.sort));
      }
      out.declare_function(std::move(decl));
    }
    for (const Constructor& c : dt.constructors)
    {
      for (const Selector& s : c.selectors)
      {
        out.declare_function(FunctionDecl{s.name, {self}, map_sort(s.sort)});
      }
    }
    for (const Constructor& c : dt.constructors)
    {
      out.declare_function(
          FunctionDecl{std::string(kTesterPrefix) + c.name, {self}, Sort::boolean()});
    }
  }
  for (const FunctionDecl& f : sig.functions())
  {
    FunctionDecl decl{f.name, {}, map_sort(f.range)};
    for (const Sort& s : f.domain)
    {
      decl.domain.push_back(map_sort(s));
    }
    out.declare_function(std::move(decl));
  }
  for (Term v : query.vars)
  {
    out.declare_function(FunctionDecl{v.symbol(), {}, map_sort(v.sort())});
    if (v.sort().is_adt())
    {
      adt_sort_.emplace(v.symbol(), v.sort());
    }
  }
}

Sort Reducer::map_sort(const Sort& s) const
{
  return s.is_adt() ? Sort::uninterpreted(s.name()) : s;
}

const Sort& Reducer::adt_sort_of(Term uf_var) const
{
  auto it = adt_sort_.find(uf_var.symbol());
  if (!uf_var.is_var() || it == adt_sort_.end())
  {
    throw Error(ErrorKind::Invalid, "reduce",
                "not a datatype variable: " + to_smtlib(uf_var, 200));
  }
  return it->second;
}

Term Reducer::translate(Term t)
{
  if (auto it = translated_.find(t.id()); it != translated_.end())
  {
    return it->second;
  }
  std::vector<Term> args;
  for (Term a : t.args())
  {
    args.push_back(translate(a));
  }
  Term result;
  switch (t.kind())
  {
    case TermKind::True: result = uf_->mk_true(); break;
    case TermKind::False: result = uf_->mk_false(); break;
    case TermKind::Variable: result = uf_->mk_var(t.symbol()); break;
    case TermKind::Constructor:
      result = args.empty() ? uf_->mk_var(t.symbol()) : uf_->mk_apply(t.symbol(), std::move(args));
      break;
    case TermKind::Selector:
    case TermKind::Apply: result = uf_->mk_apply(t.symbol(), std::move(args)); break;
    case TermKind::Tester: result = tester(t.symbol(), args[0]); break;
    default: result = uf_->mk_app_like(t, std::move(args)); break;
  }
  translated_.emplace(t.id(), result);
  return result;
}

Term Reducer::tester(std::string_view constructor, Term uf_arg)
{
  return uf_->mk_apply(std::string(kTesterPrefix) + std::string(constructor), {uf_arg});
}

std::vector<Term> Reducer::rule_a(const FlatLiteral& literal)
{
  if (literal.kind != LiteralKind::Def || literal.rhs.kind() != TermKind::Constructor)
  {
    throw Error(ErrorKind::Invalid, "reduce", "rule A needs a constructor definition");
  }
  Term t = translate(literal.var);
  const Constructor& ctor = adts_.constructor(*adts_.constructor(literal.rhs.symbol()));
  std::vector<Term> out{uf_->mk_eq(translate(literal.rhs), t), tester(ctor.name, t)};
  for (std::size_t i = 0; i < ctor.arity(); ++i)
  {
    out.push_back(uf_->mk_eq(uf_->mk_apply(ctor.selectors[i].name, {t}),
                             translate(literal.rhs[i])));
  }
  return out;
}

Term Reducer::fresh_skolem(const Sort& sort)
{
  Term s = uf_->mk_fresh_var(kSkolemPrefix, map_sort(sort));
  if (sort.is_adt())
  {
    adt_sort_.emplace(s.symbol(), sort);
  }
  skolems_.push_back(s);
  return s;
}

RuleB Reducer::expand(Term t, const ConstructorRef& ref)
{
  auto key = std::make_tuple(t.id(), ref.datatype, ref.index);
  if (auto it = expansions_.find(key); it != expansions_.end())
  {
    return it->second;
  }
  const Constructor& ctor = adts_.constructor(ref);
  RuleB result;
  std::vector<Term> conj;
  for (const Selector& s : ctor.selectors)
  {
    result.skolems.push_back(fresh_skolem(s.sort));
  }
  Term built = ctor.is_constant() ? uf_->mk_var(ctor.name) : uf_->mk_apply(ctor.name, result.skolems);
  conj.push_back(uf_->mk_eq(built, t));
  for (std::size_t i = 0; i < ctor.arity(); ++i)
  {
    conj.push_back(uf_->mk_eq(uf_->mk_apply(ctor.selectors[i].name, {t}), result.skolems[i]));
  }
  result.expansion = uf_->mk_implies(tester(ctor.name, t), uf_->mk_and(std::move(conj)));
  pending_expansions_.push_back(result.expansion);
  expansions_.emplace(key, result);
  return result;
}

RuleB Reducer::rule_b(const FlatLiteral& literal)
{
  if ((literal.kind != LiteralKind::Def && literal.kind != LiteralKind::Pred) ||
      literal.rhs.kind() != TermKind::Selector)
  {
    throw Error(ErrorKind::Invalid, "reduce", "rule B needs a selector literal");
  }
  SelectorRef sel = *adts_.selector(literal.rhs.symbol());
  RuleB result = expand(translate(literal.rhs[0]), ConstructorRef{sel.datatype, sel.constructor});
  result.literal = translate(literal_term(*query_.terms, literal));
  return result;
}

Term Reducer::axiom1(Term t)
{
  const Datatype& dt = adts_.datatype(adt_sort_of(t).name());
  std::vector<Term> testers;
  for (const Constructor& c : dt.constructors)
  {
    testers.push_back(tester(c.name, t));
  }
  if (testers.size() == 1)
  {
    return testers[0];
  }
  std::vector<Term> cases;
  for (std::size_t i = 0; i < testers.size(); ++i)
  {
    std::vector<Term> conj{testers[i]};
    for (std::size_t j = 0; j < testers.size(); ++j)
    {
      if (j != i)
      {
        conj.push_back(uf_->mk_not(testers[j]));
      }
    }
    cases.push_back(uf_->mk_and(std::move(conj)));
  }
  return uf_->mk_or(std::move(cases));
}

std::vector<Term> Reducer::axiom2(Term t)
{
  const Datatype& dt = adts_.datatype(adt_sort_of(t).name());
  std::vector<Term> out;
  for (const Constructor& c : dt.constructors)
  {
    if (c.is_constant())
    {
      out.push_back(uf_->mk_iff(tester(c.name, t), uf_->mk_eq(uf_->mk_var(c.name), t)));
    }
  }
  return out;
}

std::vector<Term> Reducer::axiom3(Term t, std::size_t k)
{
  const Sort& start = adt_sort_of(t);
  std::size_t start_index = graph_.index(start.name());
  std::vector<Term> out;
  // Depth-first order visits a path right after its prefix, so level l
  // extends level l - 1. Guards nest left so that chains with a common
  // prefix share them.
  std::vector<Term> chains{t};
  std::vector<Term> guards{Term()};
  for_each_selector_chain(adts_, start, k, [&](std::span<const SelectorRef> path) {
    const SelectorRef& ref = path.back();
    const Selector& last = adts_.selector(ref);
    std::size_t l = path.size();
    chains.resize(l + 1);
    guards.resize(l + 1);
    Term test = tester(adts_.constructor_of(ref).name, chains[l - 1]);
    guards[l] = guards[l - 1] ? uf_->mk_and({guards[l - 1], test}) : test;
    chains[l] = uf_->mk_apply(last.name, {chains[l - 1]});
    if (last.sort == start)
    {
      out.push_back(uf_->mk_implies(guards[l], uf_->mk_not(uf_->mk_eq(chains[l], t))));
      if (out.size() > options_.axiom3_cap)
      {
        resource_limit("acyclicality instantiation for " + t.symbol() + " exceeds " +
                       std::to_string(options_.axiom3_cap) + " assertions");
      }
    }
    return last.sort.is_adt() && graph_.reaches(graph_.index(last.sort.name()), start_index);
  });
  return out;
}

Term Reducer::normal_constant(const NormalTerm& n, const Sort& sort)
{
  if (sort.is_bool())
  {
    return uf_->mk_bool(n.constructor == "true");
  }
  return normal_constants_.at(sort.name()).at(n);
}

void Reducer::ensure_constants(const std::string& adt, std::vector<Term>& assertions)
{
  if (universe_constants_.count(adt) != 0)
  {
    return;
  }
  const UniverseEntry& entry = universe_.at(adt);
  if (!entry.finite)
  {
    throw Error(ErrorKind::Invalid, "reduce", "datatype '" + adt + "' has an infinite universe");
  }
  if (!entry.enumerated)
  {
    resource_limit("universe of '" + adt + "' has " + std::to_string(entry.size) +
                   " elements, above the cap of " + std::to_string(options_.universe_cap));
  }
  const Datatype& dt = adts_.datatype(adt);
  for (const Constructor& c : dt.constructors)
  {
    for (const Selector& s : c.selectors)
    {
      if (s.sort.is_adt())
      {
        ensure_constants(s.sort.name(), assertions);
      }
    }
  }
  std::vector<Term>& constants = universe_constants_[adt];
  auto& by_term = normal_constants_[adt];
  std::string prefix = std::string(kUniversePrefix) + adt + "!";
  for (const NormalTerm& n : entry.enumeration)
  {
    Term c = uf_->mk_fresh_var(prefix, Sort::uninterpreted(adt));
    constants.push_back(c);
    by_term.emplace(n, c);
  }
  if (constants.size() >= 2)
  {
    assertions.push_back(uf_->mk_distinct(constants));
  }
  for (std::size_t i = 0; i < constants.size(); ++i)
  {
    const NormalTerm& n = entry.enumeration[i];
    Term c = constants[i];
    const Constructor& ctor = adts_.constructor(*adts_.constructor(n.constructor));
    for (const Constructor& other : dt.constructors)
    {
      Term is = tester(other.name, c);
      assertions.push_back(other.name == ctor.name ? is : uf_->mk_not(is));
    }
    std::vector<Term> children;
    for (std::size_t j = 0; j < ctor.arity(); ++j)
    {
      children.push_back(normal_constant(n.children[j], ctor.selectors[j].sort));
    }
    Term built = ctor.is_constant() ? uf_->mk_var(ctor.name) : uf_->mk_apply(ctor.name, children);
    assertions.push_back(uf_->mk_eq(built, c));
    for (std::size_t j = 0; j < ctor.arity(); ++j)
    {
      assertions.push_back(uf_->mk_eq(uf_->mk_apply(ctor.selectors[j].name, {c}), children[j]));
    }
  }
}

Reducer::Universe Reducer::instantiate_universe(std::string_view adt, const std::vector<Term>& vars)
{
  Universe out;
  std::string name(adt);
  ensure_constants(name, out.assertions);
  out.constants = universe_constants_.at(name);
  for (Term v : vars)
  {
    if (!(adt_sort_of(v).name() == name))
    {
      throw Error(ErrorKind::Invalid, "reduce", "variable " + v.symbol() + " is not of sort " + name);
    }
    std::vector<Term> options;
    for (Term c : out.constants)
    {
      options.push_back(uf_->mk_eq(v, c));
    }
    out.assertions.push_back(uf_->mk_or(std::move(options)));
  }
  return out;
}

UfQuery Reducer::run()
{
  UfQuery result;
  Script& script = result.script;
  script.terms = uf_;
  script.logic = "QF_UF";
  script.check_sat = true;
  ReduceStats& stats = result.stats;
  stats.variables = query_.vars.size();

  // Skeleton.
  std::vector<Term> built(query_.nodes.size());
  std::vector<Term> literal_terms;
  for (const FlatLiteral& lit : query_.literals)
  {
    literal_terms.push_back(translate(literal_term(*query_.terms, lit)));
  }
  for (std::size_t i = 0; i < query_.nodes.size(); ++i)
  {
    const SkeletonNode& n = query_.nodes[i];
    std::vector<Term> kids;
    for (std::size_t c : n.children)
    {
      kids.push_back(built[c]);
    }
    switch (n.kind)
    {
      case NodeKind::True: built[i] = uf_->mk_true(); break;
      case NodeKind::False: built[i] = uf_->mk_false(); break;
      case NodeKind::Literal: built[i] = literal_terms[n.literal]; break;
      case NodeKind::BoolVar: built[i] = translate(n.var); break;
      case NodeKind::Not: built[i] = uf_->mk_not(kids[0]); break;
      case NodeKind::And: built[i] = uf_->mk_and(std::move(kids)); break;
      case NodeKind::Or: built[i] = uf_->mk_or(std::move(kids)); break;
      case NodeKind::Implies: built[i] = uf_->mk_implies(kids[0], kids[1]); break;
      case NodeKind::Iff: built[i] = uf_->mk_iff(kids[0], kids[1]); break;
    }
  }
  const SkeletonNode& root = query_.nodes.at(query_.root);
  if (root.kind == NodeKind::And)
  {
    for (std::size_t c : root.children)
    {
      script.assertions.push_back(built[c]);
    }
  }
  else
  {
    script.assertions.push_back(built[query_.root]);
  }

  // Rules A and B.
  for (std::size_t i = 0; i < query_.literals.size(); ++i)
  {
    const FlatLiteral& lit = query_.literals[i];
    if (lit.kind == LiteralKind::Def && lit.rhs.kind() == TermKind::Constructor)
    {
      std::vector<Term> consequences = rule_a(lit);
      consequences.erase(consequences.begin());
      script.assertions.push_back(
          uf_->mk_implies(literal_terms[i], uf_->mk_and(std::move(consequences))));
    }
    else if (lit.rhs.kind() == TermKind::Selector &&
             (lit.kind == LiteralKind::Def || lit.kind == LiteralKind::Pred))
    {
      rule_b(lit);
    }
  }

  std::vector<Term> adt_vars;
  for (Term v : query_.vars)
  {
    if (v.sort().is_adt())
    {
      adt_vars.push_back(translate(v));
    }
  }
  // Skolems created so far join the variable list; expansions below may add
  // more, which are finite-sorted and so never expand again.
  auto absorb_skolems = [&](std::size_t from) {
    for (std::size_t i = from; i < skolems_.size(); ++i)
    {
      if (adt_sort_.count(skolems_[i].symbol()) != 0)
      {
        adt_vars.push_back(skolems_[i]);
      }
    }
    return skolems_.size();
  };
  std::size_t absorbed = absorb_skolems(0);

  if (options_.finite_constructor_expansion)
  {
    auto finite_sort = [&](const Sort& s) {
      return s.is_bool() || (s.is_adt() && universe_.at(s.name()).finite);
    };
    for (std::size_t i = 0; i < adt_vars.size(); ++i)
    {
      Term v = adt_vars[i];
      const Sort& sort = adt_sort_of(v);
      if (universe_.at(sort.name()).finite)
      {
        continue;
      }
      std::size_t d = *adts_.find(sort.name());
      const Datatype& dt = adts_.datatype(d);
      for (std::size_t c = 0; c < dt.constructors.size(); ++c)
      {
        const Constructor& ctor = dt.constructors[c];
        if (!ctor.is_constant() &&
            std::all_of(ctor.selectors.begin(), ctor.selectors.end(),
                        [&](const Selector& s) { return finite_sort(s.sort); }))
        {
          expand(v, ConstructorRef{d, c});
        }
      }
      absorbed = absorb_skolems(absorbed);
    }
  }
  for (Term e : pending_expansions_)
  {
    script.assertions.push_back(e);
  }
  stats.skolems = skolems_.size();

  // Depths over the Skolemized variable set.
  std::vector<Sort> sorts;
  for (Term v : adt_vars)
  {
    sorts.push_back(adt_sort_of(v));
  }
  result.depths = compute_depths(sorts, graph_);

  for (Term v : adt_vars)
  {
    script.assertions.push_back(axiom1(v));
    ++stats.axiom1;
  }
  for (Term v : adt_vars)
  {
    for (Term a : axiom2(v))
    {
      script.assertions.push_back(a);
      ++stats.axiom2;
    }
  }
  if (options_.acyclicality)
  {
    std::uint64_t max_selectors = 0;
    for (const Datatype& dt : adts_.datatypes())
    {
      std::uint64_t count = 0;
      for (const Constructor& c : dt.constructors)
      {
        count += c.arity();
      }
      max_selectors = std::max(max_selectors, count);
    }
    std::uint64_t bound = 0;
    for (Term v : adt_vars)
    {
      std::size_t k = result.depths.at(adt_sort_of(v).name());
      std::uint64_t power = 1;
      for (std::size_t l = 1; l <= k; ++l)
      {
        power = sat_mul(power, max_selectors);
        bound = sat_add(bound, power);
      }
      std::vector<Term> axioms = axiom3(v, k);
      stats.axiom3 += axioms.size();
      if (stats.axiom3 > options_.axiom3_cap)
      {
        resource_limit("acyclicality instantiation exceeds " +
                       std::to_string(options_.axiom3_cap) + " assertions");
      }
      script.assertions.insert(script.assertions.end(), axioms.begin(), axioms.end());
    }
    if (stats.axiom3 > bound)
    {
      throw Error(ErrorKind::Invalid, "reduce",
                  "acyclicality instantiation exceeded its counting bound");
    }
  }

  for (const UniverseEntry& entry : universe_.entries)
  {
    if (!entry.finite)
    {
      continue;
    }
    std::vector<Term> members;
    for (Term v : adt_vars)
    {
      if (adt_sort_of(v).name() == entry.adt)
      {
        members.push_back(v);
      }
    }
    Universe u = instantiate_universe(entry.adt, members);
    script.assertions.insert(script.assertions.end(), u.assertions.begin(), u.assertions.end());
    // A selector applied to the wrong constructor still yields a member.
    std::set<std::size_t> selected;
    for (const FlatLiteral& lit : query_.literals)
    {
      if (lit.rhs.kind() == TermKind::Selector && lit.rhs.sort().is_adt() &&
          lit.rhs.sort().name() == entry.adt && selected.insert(translate(lit.rhs).id()).second)
      {
        std::vector<Term> options;
        for (Term c : u.constants)
        {
          options.push_back(uf_->mk_eq(translate(lit.rhs), c));
        }
        script.assertions.push_back(uf_->mk_or(std::move(options)));
      }
    }
  }
  for (const auto& [_, cs] : universe_constants_)
  {
    stats.universe_constants += cs.size();
  }
  return result;
}

UfQuery reduce(const FlatQuery& query, const ReduceOptions& options)
{
  return Reducer(query, options).run();
}

}  // namespace adteager
