#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "adteager/depth.h"
#include "adteager/frontend.h"
#include "adteager/ir.h"
#include "adteager/preprocess.h"

namespace adteager {

inline constexpr std::string_view kTesterPrefix = "algb!is-";
inline constexpr std::string_view kSkolemPrefix = "algb!sk!";
inline constexpr std::string_view kUniversePrefix = "algb!u!";

struct UniverseEntry
{
  std::string adt;
  bool finite = false;
  /// Number of normal terms when finite; saturates at UINT64_MAX.
  std::uint64_t size = 0;
  /// Normal terms in constructor-declaration order, filled when finite and
  /// size <= the enumeration cap.
  std::vector<NormalTerm> enumeration;
  bool enumerated = false;
};

struct UniverseInfo
{
  std::vector<UniverseEntry> entries;  // datatype declaration order

  const UniverseEntry& at(std::string_view adt) const;
};

/// Finite datatypes are those not on or above a cycle of the graph and not
/// depending on an uninterpreted sort. Bool counts as a sort of size 2.
UniverseInfo universe_info(const AdtSignature& adts, const AdtGraph& graph,
                           std::size_t enumeration_cap = 4096);

struct ReduceOptions
{
  /// Instantiate the acyclicality axioms. Switching this off is only
  /// useful to show that they matter.
  bool acyclicality = true;
  /// Expand variables of infinite sort over constructors whose arguments
  /// all have finite sorts.
  bool finite_constructor_expansion = true;
  std::size_t universe_cap = 4096;
  std::size_t axiom3_cap = 2'000'000;
};

struct ReduceStats
{
  std::size_t variables = 0;
  std::size_t skolems = 0;
  std::size_t axiom1 = 0;
  std::size_t axiom2 = 0;
  std::size_t axiom3 = 0;
  std::size_t universe_constants = 0;

  std::string to_json() const;
};

/// The reduced query: a script over Booleans, uninterpreted sorts (one per
/// former datatype) and uninterpreted functions.
struct UfQuery
{
  Script script;
  DepthMap depths;
  ReduceStats stats;
};

/// Result of the selector rewrite: the original literal is kept, and the
/// expansion is-f(t) => (f(s) = t and f^i(t) = s_i) is added.
struct RuleB
{
  Term literal;
  Term expansion;
  std::vector<Term> skolems;
};

/// Translates a flat ADT query into UF. The individual rules and axioms are
/// public so they can be examined on their own; `run` applies the whole
/// pipeline. Terms passed in belong to the flat query's manager; returned
/// terms belong to `uf()`.
class Reducer
{
 public:
  Reducer(const FlatQuery& query, ReduceOptions options = {});

  TermManager& uf() { return *uf_; }
  const AdtGraph& graph() const { return graph_; }
  const UniverseInfo& universe() const { return universe_; }

  /// UF image of an ADT-side term.
  Term translate(Term t);
  /// Tester is-C applied to a UF term.
  Term tester(std::string_view constructor, Term uf_arg);

  /// Constructor literal t = f(s1..sl): {f(s) = t, is-f(t), f^i(t) = s_i}.
  std::vector<Term> rule_a(const FlatLiteral& literal);
  /// Selector literal t_j = f^j(t) (or a Boolean selector atom).
  RuleB rule_b(const FlatLiteral& literal);
  /// Guarded expansion of UF variable `t` over constructor `ctor`; Skolems
  /// are shared per (t, ctor).
  RuleB expand(Term t, const ConstructorRef& ctor);

  Term axiom1(Term t);
  std::vector<Term> axiom2(Term t);
  std::vector<Term> axiom3(Term t, std::size_t k);

  struct Universe
  {
    std::vector<Term> constants;
    std::vector<Term> assertions;
  };
  /// Constants, distinctness, membership of `vars` and full behaviour of
  /// constructors, selectors and testers on the constants.
  Universe instantiate_universe(std::string_view adt, const std::vector<Term>& vars);

  UfQuery run();

 private:
  Sort map_sort(const Sort& s) const;
  Term fresh_skolem(const Sort& adt_sort);
  Term normal_constant(const NormalTerm& n, const Sort& sort);
  void ensure_constants(const std::string& adt, std::vector<Term>& assertions);
  const Sort& adt_sort_of(Term uf_var) const;

  const FlatQuery& query_;
  ReduceOptions options_;
  const AdtSignature& adts_;
  AdtGraph graph_;
  UniverseInfo universe_;
  std::shared_ptr<TermManager> uf_;
  std::map<std::uint32_t, Term> translated_;
  std::map<std::tuple<std::uint32_t, std::size_t, std::size_t>, RuleB> expansions_;
  std::vector<Term> pending_expansions_;
  std::map<std::string, Sort> adt_sort_;  // UF variable name -> datatype sort
  std::vector<Term> skolems_;
  std::map<std::string, std::vector<Term>> universe_constants_;
  std::map<std::string, std::map<NormalTerm, Term>> normal_constants_;
};

/// reduce(q) = Reducer(q, options).run().
UfQuery reduce(const FlatQuery& query, const ReduceOptions& options = {});

}  // namespace adteager
