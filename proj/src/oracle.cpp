#include <algorithm>
#include <map>
#include <set>

#include "adteager/backend.h"
#include "adteager/depth.h"
#include "adteager/error.h"
#include "adteager/reduce.h"

namespace adteager {

namespace {

constexpr int kFalse = 0;
constexpr int kTrue = 1;
constexpr int kOpaque = -1;  // constructor slot of values unequal to all others

enum class Tri : std::uint8_t { False, True, Unknown };

struct ResourceExhausted
{
};

/// Interned normal terms. Ids 0 and 1 are the Booleans.
class ValueTable
{
 public:
  struct Value
  {
    int ctor;  // global constructor index, kOpaque, or -2 for Booleans
    std::vector<int> children;
    std::size_t depth;
  };

  ValueTable()
  {
    values_.push_back(Value{-2, {}, 0});
    values_.push_back(Value{-2, {}, 0});
  }

  int make(int ctor, std::vector<int> children)
  {
    auto key = std::make_pair(ctor, children);
    if (auto it = index_.find(key); it != index_.end())
    {
      return it->second;
    }
    std::size_t depth = 0;
    for (int c : children)
    {
      depth = std::max(depth, values_[c].depth + 1);
    }
    if (children.empty())
    {
      depth = 0;
    }
    values_.push_back(Value{ctor, std::move(children), depth});
    int id = static_cast<int>(values_.size() - 1);
    index_.emplace(std::move(key), id);
    return id;
  }

  int opaque()
  {
    values_.push_back(Value{kOpaque, {}, 0});
    return static_cast<int>(values_.size() - 1);
  }

  const Value& at(int id) const { return values_.at(static_cast<std::size_t>(id)); }

 private:
  std::vector<Value> values_;
  std::map<std::pair<int, std::vector<int>>, int> index_;
};

/// Literal with its operands resolved to variable slots.
struct CompiledLiteral
{
  enum class Op : std::uint8_t { Eq, Neq, DefCtor, DefSel, DefTest, PredTest, PredSel };
  Op op;
  int target = -1;         // variable slot compared with the application
  int ctor = -1;           // global constructor (DefCtor, testers, selector owner)
  int selector = -1;       // global selector index
  std::size_t field = 0;   // selector position
  std::vector<int> args;   // variable slots
};

class Oracle
{
 public:
  Oracle(const FlatQuery& q, const OracleOptions& options) : q_(q), options_(options)
  {
    const AdtSignature& adts = q.signature().adts();
    for (std::size_t d = 0; d < adts.datatypes().size(); ++d)
    {
      const Datatype& dt = adts.datatype(d);
      for (std::size_t c = 0; c < dt.constructors.size(); ++c)
      {
        ctor_index_[dt.constructors[c].name] = static_cast<int>(ctors_.size());
        ctors_.push_back(CtorInfo{d, c, &dt.constructors[c]});
        for (std::size_t f = 0; f < dt.constructors[c].arity(); ++f)
        {
          selector_index_[dt.constructors[c].selectors[f].name] =
              static_cast<int>(selectors_.size());
          selectors_.push_back(SelInfo{static_cast<int>(ctors_.size() - 1), f,
                                       dt.constructors[c].selectors[f].sort});
        }
      }
    }
    for (Term v : q.vars)
    {
      if (v.sort().is_uninterpreted())
      {
        throw Error(ErrorKind::Fragment, "backend",
                    "oracle: variable " + v.symbol() + " has uninterpreted sort");
      }
      slot_[v.symbol()] = static_cast<int>(vars_.size());
      vars_.push_back(v);
    }
    for (const FlatLiteral& lit : q.literals)
    {
      literals_.push_back(compile(lit));
    }
    plan_derivations();
  }

  std::size_t required_bound() const
  {
    const AdtSignature& adts = q_.signature().adts();
    AdtGraph graph = build_graph(adts);
    std::vector<Sort> sorts;
    std::set<std::pair<int, int>> expanded;
    bool nesting = false;
    for (Term v : vars_)
    {
      sorts.push_back(v.sort());
    }
    for (const CompiledLiteral& l : literals_)
    {
      if (l.op == CompiledLiteral::Op::DefCtor)
      {
        nesting = true;
      }
      if ((l.op == CompiledLiteral::Op::DefSel || l.op == CompiledLiteral::Op::PredSel) &&
          expanded.emplace(l.args[0], l.ctor).second)
      {
        for (const Selector& s : ctors_[l.ctor].ctor->selectors)
        {
          sorts.push_back(s.sort);
        }
      }
    }
    UniverseInfo universe = universe_info(adts, graph, options_.max_domain);
    std::size_t finite_depth = 0;
    for (const UniverseEntry& e : universe.entries)
    {
      for (const NormalTerm& n : e.enumeration)
      {
        finite_depth = std::max(finite_depth, n.depth());
      }
    }
    // Variables of infinite sort chain through constructors at most
    // `chain` deep. Below that sit finite values and unconstrained
    // variables, which need pairwise distinct values that also avoid every
    // other variable's value.
    auto infinite = [&](const Sort& s) { return s.is_adt() && !universe.at(s.name()).finite; };
    std::size_t chain = static_cast<std::size_t>(std::count_if(sorts.begin(), sorts.end(), infinite));
    std::size_t spread = finite_depth;
    for (const Sort& s : sorts)
    {
      if (infinite(s))
      {
        spread = std::max(spread, depth_for_count(s.name(), 2 * chain + 2));
      }
    }
    std::size_t bound = std::max(compute_depths(sorts, graph).max() + (nesting ? 1 : 0),
                                 chain + spread);
    return bound;
  }

  /// Smallest d such that `adt` has at least `count` values of depth <= d.
  std::size_t depth_for_count(const std::string& adt, std::uint64_t count) const
  {
    const AdtSignature& adts = q_.signature().adts();
    std::vector<std::uint64_t> prev(adts.datatypes().size(), 0);
    for (std::size_t d = 0;; ++d)
    {
      std::vector<std::uint64_t> cur(prev.size(), 0);
      for (std::size_t i = 0; i < cur.size(); ++i)
      {
        for (const Constructor& c : adts.datatype(i).constructors)
        {
          std::uint64_t n = 1;
          for (const Selector& f : c.selectors)
          {
            std::uint64_t k = f.sort.is_bool() ? (d > 0 ? 2 : 0)
                              : f.sort.is_adt() ? prev[*adts.find(f.sort.name())]
                                                : 0;
            n = (n == 0 || k == 0) ? 0 : (n > count / k ? count : std::min(count, n * k));
          }
          cur[i] = std::min(count, cur[i] + n);
        }
      }
      if (cur[*adts.find(adt)] >= count)
      {
        return d;
      }
      if (d > 0 && cur == prev)
      {
        return d;  // finite after all
      }
      prev = std::move(cur);
    }
  }

  /// Whether the skeleton is false before any variable is assigned.
  bool refuted_outright()
  {
    assignment_.assign(vars_.size(), -1);
    return evaluate() == Tri::False;
  }

  /// Searches assignments with every enumerated variable of depth <= d.
  std::optional<Witness> search(std::size_t depth)
  {
    depth_ = depth;
    domains_.clear();
    assignment_.assign(vars_.size(), -1);
    choices_.clear();
    if (assign_next(0))
    {
      return make_witness();
    }
    return std::nullopt;
  }

  bool check(const Witness& w)
  {
    assignment_.assign(vars_.size(), -1);
    choices_.clear();
    for (std::size_t i = 0; i < vars_.size(); ++i)
    {
      auto it = w.values.find(vars_[i].symbol());
      if (it == w.values.end())
      {
        return false;
      }
      assignment_[i] = intern(it->second);
    }
    for (const SelectorChoice& c : w.choices)
    {
      auto sel = selector_index_.find(c.selector);
      if (sel == selector_index_.end())
      {
        return false;
      }
      choices_[{sel->second, intern(c.argument)}] = intern(c.value);
    }
    return evaluate() == Tri::True;
  }

 private:
  struct CtorInfo
  {
    std::size_t datatype;
    std::size_t index;
    const Constructor* ctor;
  };
  struct SelInfo
  {
    int ctor;
    std::size_t field;
    Sort sort;
  };
  struct Derivation
  {
    int target;
    std::size_t literal;
  };

  int slot(Term v) const { return slot_.at(v.symbol()); }

  CompiledLiteral compile(const FlatLiteral& lit)
  {
    using Op = CompiledLiteral::Op;
    CompiledLiteral c{};
    if (lit.kind == LiteralKind::Eq || lit.kind == LiteralKind::Neq)
    {
      c.op = lit.kind == LiteralKind::Eq ? Op::Eq : Op::Neq;
      c.target = slot(lit.var);
      c.args = {slot(lit.rhs)};
      return c;
    }
    Term app = lit.rhs;
    for (Term a : app.args())
    {
      c.args.push_back(slot(a));
    }
    bool pred = lit.kind == LiteralKind::Pred;
    if (!pred)
    {
      c.target = slot(lit.var);
    }
    switch (app.kind())
    {
      case TermKind::Constructor:
        c.op = Op::DefCtor;
        c.ctor = ctor_index_.at(app.symbol());
        break;
      case TermKind::Tester:
        c.op = pred ? Op::PredTest : Op::DefTest;
        c.ctor = ctor_index_.at(app.symbol());
        break;
      case TermKind::Selector:
        c.op = pred ? Op::PredSel : Op::DefSel;
        c.selector = selector_index_.at(app.symbol());
        c.ctor = selectors_[c.selector].ctor;
        c.field = selectors_[c.selector].field;
        break;
      default:
        throw Error(ErrorKind::Fragment, "backend",
                    "oracle: uninterpreted function " + app.symbol());
    }
    return c;
  }

  /// Top-level constructor, tester and selector definitions fix their
  /// variable once the argument is known; those variables are enumerated
  /// only when a selector turns out to be mis-applied.
  void plan_derivations()
  {
    derived_.assign(vars_.size(), false);
    const SkeletonNode& root = q_.nodes[q_.root];
    std::vector<std::size_t> top;
    if (root.kind == NodeKind::And)
    {
      top = root.children;
    }
    else
    {
      top = {q_.root};
    }
    std::vector<std::vector<int>> depends(vars_.size());
    auto reaches = [&](int from, int to) {
      std::vector<int> stack{from};
      std::vector<bool> seen(vars_.size(), false);
      while (!stack.empty())
      {
        int v = stack.back();
        stack.pop_back();
        if (v == to)
        {
          return true;
        }
        if (seen[v])
        {
          continue;
        }
        seen[v] = true;
        for (int d : depends[v])
        {
          stack.push_back(d);
        }
      }
      return false;
    };
    for (std::size_t n : top)
    {
      const SkeletonNode& node = q_.nodes[n];
      if (node.kind != NodeKind::Literal)
      {
        continue;
      }
      const CompiledLiteral& l = literals_[node.literal];
      if (l.op != CompiledLiteral::Op::DefCtor && l.op != CompiledLiteral::Op::DefTest &&
          l.op != CompiledLiteral::Op::DefSel)
      {
        continue;
      }
      if (derived_[l.target] ||
          std::any_of(l.args.begin(), l.args.end(), [&](int a) { return reaches(a, l.target); }))
      {
        continue;
      }
      derived_[l.target] = true;
      depends[l.target] = l.args;
      derivations_.push_back(Derivation{l.target, node.literal});
      derivation_of_[l.target] = node.literal;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
    {
      if (!derived_[i])
      {
        order_.push_back(static_cast<int>(i));
      }
    }
  }

  const std::vector<int>& domain(const Sort& sort, std::size_t depth)
  {
    static const std::vector<int> booleans = {kFalse, kTrue};
    if (sort.is_bool())
    {
      return booleans;
    }
    auto key = std::make_pair(sort.name(), depth);
    if (auto it = domains_.find(key); it != domains_.end())
    {
      return it->second;
    }
    std::vector<int> values;
    const AdtSignature& adts = q_.signature().adts();
    const Datatype& dt = adts.datatype(sort.name());
    for (const Constructor& c : dt.constructors)
    {
      int ctor = ctor_index_.at(c.name);
      if (c.is_constant())
      {
        values.push_back(table_.make(ctor, {}));
        continue;
      }
      if (depth == 0)
      {
        continue;
      }
      std::vector<const std::vector<int>*> fields;
      for (const Selector& s : c.selectors)
      {
        fields.push_back(&domain(s.sort, depth - 1));
      }
      if (std::any_of(fields.begin(), fields.end(), [](auto* f) { return f->empty(); }))
      {
        continue;
      }
      std::vector<std::size_t> index(fields.size(), 0);
      bool done = false;
      while (!done)
      {
        std::vector<int> children;
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
          children.push_back((*fields[i])[index[i]]);
        }
        values.push_back(table_.make(ctor, std::move(children)));
        if (values.size() > options_.max_domain)
        {
          throw ResourceExhausted{};
        }
        done = true;
        for (std::size_t i = fields.size(); i-- > 0;)
        {
          if (++index[i] < fields[i]->size())
          {
            done = false;
            break;
          }
          index[i] = 0;
        }
      }
    }
    return domains_.emplace(key, std::move(values)).first->second;
  }

  /// Value of a selector on `arg`: the field, a choice, or -1 when the
  /// choice is still open.
  int select(const CompiledLiteral& l, int arg) const
  {
    const ValueTable::Value& v = table_.at(arg);
    if (v.ctor == l.ctor)
    {
      return v.children[l.field];
    }
    auto it = choices_.find({l.selector, arg});
    return it == choices_.end() ? -1 : it->second;
  }

  Tri literal(const CompiledLiteral& l) const
  {
    using Op = CompiledLiteral::Op;
    if ((l.op == Op::Eq || l.op == Op::Neq) && l.target == l.args[0])
    {
      return l.op == Op::Eq ? Tri::True : Tri::False;
    }
    for (int a : l.args)
    {
      if (assignment_[a] < 0)
      {
        return Tri::Unknown;
      }
    }
    if (l.target >= 0 && assignment_[l.target] < 0)
    {
      return Tri::Unknown;
    }
    auto tri = [](bool b) { return b ? Tri::True : Tri::False; };
    switch (l.op)
    {
      case Op::Eq: return tri(assignment_[l.target] == assignment_[l.args[0]]);
      case Op::Neq: return tri(assignment_[l.target] != assignment_[l.args[0]]);
      case Op::DefCtor:
      {
        const ValueTable::Value& t = table_.at(assignment_[l.target]);
        if (t.ctor != l.ctor)
        {
          return Tri::False;
        }
        for (std::size_t i = 0; i < l.args.size(); ++i)
        {
          if (t.children[i] != assignment_[l.args[i]])
          {
            return Tri::False;
          }
        }
        return Tri::True;
      }
      case Op::DefTest:
      {
        bool is = table_.at(assignment_[l.args[0]]).ctor == l.ctor;
        return tri((assignment_[l.target] == kTrue) == is);
      }
      case Op::PredTest: return tri(table_.at(assignment_[l.args[0]]).ctor == l.ctor);
      case Op::DefSel:
      {
        int value = select(l, assignment_[l.args[0]]);
        return value < 0 ? Tri::Unknown : tri(value == assignment_[l.target]);
      }
      case Op::PredSel:
      {
        int value = select(l, assignment_[l.args[0]]);
        return value < 0 ? Tri::Unknown : tri(value == kTrue);
      }
    }
    return Tri::Unknown;
  }

  Tri evaluate()
  {
    ++nodes_;
    if (nodes_ > options_.max_nodes)
    {
      throw ResourceExhausted{};
    }
    values_.resize(q_.nodes.size());
    for (std::size_t i = 0; i < q_.nodes.size(); ++i)
    {
      const SkeletonNode& n = q_.nodes[i];
      Tri r = Tri::Unknown;
      switch (n.kind)
      {
        case NodeKind::True: r = Tri::True; break;
        case NodeKind::False: r = Tri::False; break;
        case NodeKind::Literal: r = literal(literals_[n.literal]); break;
        case NodeKind::BoolVar:
        {
          int v = assignment_[slot(n.var)];
          r = v < 0 ? Tri::Unknown : (v == kTrue ? Tri::True : Tri::False);
          break;
        }
        case NodeKind::Not:
        {
          Tri c = values_[n.children[0]];
          r = c == Tri::Unknown ? c : (c == Tri::True ? Tri::False : Tri::True);
          break;
        }
        case NodeKind::And:
        case NodeKind::Or:
        {
          Tri absorbing = n.kind == NodeKind::And ? Tri::False : Tri::True;
          Tri neutral = n.kind == NodeKind::And ? Tri::True : Tri::False;
          r = neutral;
          for (std::size_t c : n.children)
          {
            if (values_[c] == absorbing)
            {
              r = absorbing;
              break;
            }
            if (values_[c] == Tri::Unknown)
            {
              r = Tri::Unknown;
            }
          }
          break;
        }
        case NodeKind::Implies:
        {
          Tri a = values_[n.children[0]];
          Tri b = values_[n.children[1]];
          if (a == Tri::False || b == Tri::True)
          {
            r = Tri::True;
          }
          else if (a == Tri::True && b == Tri::False)
          {
            r = Tri::False;
          }
          break;
        }
        case NodeKind::Iff:
        {
          Tri a = values_[n.children[0]];
          Tri b = values_[n.children[1]];
          if (a != Tri::Unknown && b != Tri::Unknown)
          {
            r = a == b ? Tri::True : Tri::False;
          }
          break;
        }
      }
      values_[i] = r;
    }
    return values_[q_.root];
  }

  /// Fills derived variables whose arguments are known; returns the slots
  /// assigned so they can be undone.
  std::vector<int> propagate()
  {
    std::vector<int> trail;
    bool changed = true;
    while (changed)
    {
      changed = false;
      for (const Derivation& d : derivations_)
      {
        if (assignment_[d.target] >= 0)
        {
          continue;
        }
        const CompiledLiteral& l = literals_[d.literal];
        if (std::any_of(l.args.begin(), l.args.end(), [&](int a) { return assignment_[a] < 0; }))
        {
          continue;
        }
        if (l.op == CompiledLiteral::Op::DefSel)
        {
          const ValueTable::Value& arg = table_.at(assignment_[l.args[0]]);
          if (arg.ctor != l.ctor)
          {
            continue;
          }
          assignment_[d.target] = arg.children[l.field];
        }
        else if (l.op == CompiledLiteral::Op::DefCtor)
        {
          std::vector<int> children;
          for (int a : l.args)
          {
            children.push_back(assignment_[a]);
          }
          assignment_[d.target] = table_.make(l.ctor, std::move(children));
        }
        else
        {
          assignment_[d.target] =
              table_.at(assignment_[l.args[0]]).ctor == l.ctor ? kTrue : kFalse;
        }
        trail.push_back(d.target);
        changed = true;
      }
    }
    return trail;
  }

  bool assign_next(std::size_t position)
  {
    std::vector<int> trail = propagate();
    bool found = false;
    Tri r = evaluate();
    if (r == Tri::True)
    {
      // Unassigned variables are irrelevant; give them any value.
      fill_unassigned();
      found = true;
    }
    else if (r == Tri::Unknown)
    {
      int var = -1;
      std::size_t next = position;
      if (position < order_.size())
      {
        var = order_[position];
        next = position + 1;
      }
      else
      {
        // Variables defined by a mis-applied selector are free.
        var = next_free();
      }
      if (var < 0)
      {
        found = choose(collect_groups(), 0);
      }
      else
      {
        const std::vector<int>& values = domain(vars_[var].sort(), depth_);
        for (int value : values)
        {
          assignment_[var] = value;
          if (assign_next(next))
          {
            found = true;
            break;
          }
        }
        if (!found)
        {
          assignment_[var] = -1;
        }
      }
    }
    if (!found)
    {
      for (int t : trail)
      {
        assignment_[t] = -1;
      }
    }
    return found;
  }

  /// First unassigned variable whose definition, if any, cannot fire.
  int next_free() const
  {
    int fallback = -1;
    for (std::size_t i = 0; i < vars_.size(); ++i)
    {
      if (assignment_[i] >= 0)
      {
        continue;
      }
      if (!derived_[i])
      {
        return static_cast<int>(i);
      }
      const CompiledLiteral& l = literals_[derivation_of_.at(static_cast<int>(i))];
      if (std::all_of(l.args.begin(), l.args.end(), [&](int a) { return assignment_[a] >= 0; }))
      {
        return static_cast<int>(i);
      }
      if (fallback < 0)
      {
        fallback = static_cast<int>(i);
      }
    }
    return fallback;
  }

  void fill_unassigned()
  {
    while (true)
    {
      propagate();
      int var = next_free();
      if (var < 0)
      {
        break;
      }
      const Sort& sort = vars_[var].sort();
      for (std::size_t d = 0;; ++d)
      {
        const std::vector<int>& values = domain(sort, d);
        if (!values.empty())
        {
          assignment_[var] = values.front();
          break;
        }
      }
    }
    for (const Group& g : collect_groups())
    {
      choices_[{g.selector, g.argument}] = g.candidates.front();
    }
    if (evaluate() != Tri::True)
    {
      throw Error(ErrorKind::Invalid, "backend", "oracle: inconsistent completion");
    }
  }

  struct Group
  {
    int selector;
    int argument;
    std::vector<int> candidates;
  };

  /// Open selector choices of the current full assignment, with the values
  /// worth trying for each.
  std::vector<Group> collect_groups()
  {
    std::map<std::pair<int, int>, std::set<int>> wanted;
    std::vector<std::pair<int, int>> order;
    for (const CompiledLiteral& l : literals_)
    {
      if (l.op != CompiledLiteral::Op::DefSel && l.op != CompiledLiteral::Op::PredSel)
      {
        continue;
      }
      int arg = assignment_[l.args[0]];
      if (table_.at(arg).ctor == l.ctor)
      {
        continue;
      }
      auto key = std::make_pair(l.selector, arg);
      if (choices_.count(key) != 0)
      {
        continue;
      }
      auto [it, fresh] = wanted.try_emplace(key);
      if (fresh)
      {
        order.push_back(key);
      }
      if (l.op == CompiledLiteral::Op::DefSel)
      {
        it->second.insert(assignment_[l.target]);
      }
    }
    std::vector<Group> groups;
    for (const auto& key : order)
    {
      const Sort& sort = selectors_[key.first].sort;
      Group g{key.first, key.second, {}};
      if (sort.is_bool())
      {
        g.candidates = {kFalse, kTrue};
      }
      else if (finite(sort))
      {
        g.candidates = domain(sort, universe_depth(sort));
      }
      else
      {
        g.candidates.assign(wanted[key].begin(), wanted[key].end());
        g.candidates.push_back(table_.opaque());
      }
      groups.push_back(std::move(g));
    }
    return groups;
  }

  bool finite(const Sort& sort)
  {
    if (!universe_)
    {
      const AdtSignature& adts = q_.signature().adts();
      universe_ = universe_info(adts, build_graph(adts), options_.max_domain);
    }
    return universe_->at(sort.name()).finite;
  }

  std::size_t universe_depth(const Sort& sort)
  {
    const UniverseEntry& e = universe_->at(sort.name());
    if (!e.enumerated)
    {
      throw ResourceExhausted{};
    }
    std::size_t depth = 0;
    for (const NormalTerm& n : e.enumeration)
    {
      depth = std::max(depth, n.depth());
    }
    return depth;
  }

  bool choose(const std::vector<Group>& groups, std::size_t index)
  {
    Tri r = evaluate();
    if (r == Tri::True)
    {
      return true;
    }
    if (r == Tri::False || index == groups.size())
    {
      return false;
    }
    const Group& g = groups[index];
    for (int value : g.candidates)
    {
      choices_[{g.selector, g.argument}] = value;
      if (choose(groups, index + 1))
      {
        return true;
      }
    }
    choices_.erase({g.selector, g.argument});
    return false;
  }

  NormalTerm to_normal(int id) const
  {
    if (id == kFalse || id == kTrue)
    {
      return NormalTerm{id == kTrue ? "true" : "false", {}};
    }
    const ValueTable::Value& v = table_.at(id);
    if (v.ctor == kOpaque)
    {
      return NormalTerm{"", {}};
    }
    NormalTerm n{ctors_[v.ctor].ctor->name, {}};
    for (int c : v.children)
    {
      n.children.push_back(to_normal(c));
    }
    return n;
  }

  int intern(const NormalTerm& n)
  {
    if (n.constructor == "true" || n.constructor == "false")
    {
      return n.constructor == "true" ? kTrue : kFalse;
    }
    if (n.constructor.empty())
    {
      return table_.opaque();
    }
    auto it = ctor_index_.find(n.constructor);
    if (it == ctor_index_.end())
    {
      throw Error(ErrorKind::Invalid, "backend", "unknown constructor " + n.constructor);
    }
    std::vector<int> children;
    for (const NormalTerm& c : n.children)
    {
      children.push_back(intern(c));
    }
    if (children.size() != ctors_[it->second].ctor->arity())
    {
      throw Error(ErrorKind::Invalid, "backend", "wrong arity for " + n.constructor);
    }
    return table_.make(it->second, std::move(children));
  }

  Witness make_witness() const
  {
    Witness w;
    for (std::size_t i = 0; i < vars_.size(); ++i)
    {
      w.values.emplace(vars_[i].symbol(), to_normal(assignment_[i]));
    }
    for (const auto& [key, value] : choices_)
    {
      const SelInfo& s = selectors_[key.first];
      w.choices.push_back(SelectorChoice{ctors_[s.ctor].ctor->selectors[s.field].name,
                                         to_normal(key.second), to_normal(value)});
    }
    return w;
  }

  const FlatQuery& q_;
  OracleOptions options_;
  std::vector<CtorInfo> ctors_;
  std::vector<SelInfo> selectors_;
  std::map<std::string, int> ctor_index_;
  std::map<std::string, int> selector_index_;
  std::map<std::string, int> slot_;
  std::vector<Term> vars_;
  std::vector<CompiledLiteral> literals_;
  std::vector<bool> derived_;
  std::vector<Derivation> derivations_;
  std::map<int, std::size_t> derivation_of_;
  std::vector<int> order_;

  ValueTable table_;
  std::map<std::pair<std::string, std::size_t>, std::vector<int>> domains_;
  std::optional<UniverseInfo> universe_;
  std::size_t depth_ = 0;
  std::vector<int> assignment_;
  std::map<std::pair<int, int>, int> choices_;
  std::vector<Tri> values_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

OracleResult oracle_solve(const FlatQuery& query, std::size_t depth_bound,
                          const OracleOptions& options)
{
  Oracle oracle(query, options);
  OracleResult result;
  result.required_bound = oracle.required_bound();
  result.verdict.source = "oracle";
  try
  {
    if (oracle.refuted_outright())
    {
      result.verdict.answer = Answer::Unsat;
      return result;
    }
    for (std::size_t d = 0; d <= depth_bound; ++d)
    {
      if (auto w = oracle.search(d))
      {
        result.verdict.answer = Answer::Sat;
        for (const auto& [name, value] : w->values)
        {
          result.witness_depth = std::max(result.witness_depth, value.depth());
        }
        result.witness = std::move(w);
        return result;
      }
    }
  }
  catch (const ResourceExhausted&)
  {
    result.verdict.answer = Answer::Unknown;
    result.verdict.reason = "resource";
    return result;
  }
  if (depth_bound >= result.required_bound)
  {
    result.verdict.answer = Answer::Unsat;
  }
  else
  {
    result.verdict.answer = Answer::Unknown;
    result.verdict.reason = "bound";
  }
  return result;
}

bool evaluate_witness(const FlatQuery& query, const Witness& witness)
{
  Oracle oracle(query, OracleOptions{});
  return oracle.check(witness);
}

}  // namespace adteager
