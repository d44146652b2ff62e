#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adteager {

/// Prefix reserved for every symbol the tool invents (fresh variables,
/// mangled testers, shared subterms). User input may not use it.
inline constexpr std::string_view kReservedPrefix = "algb!";

bool has_reserved_prefix(std::string_view name);

enum class SortKind : std::uint8_t { Bool, Uninterpreted, Adt };

class Sort
{
 public:
  Sort() = default;

  static Sort boolean() { return Sort(); }
  static Sort uninterpreted(std::string name)
  {
    return Sort(SortKind::Uninterpreted, std::move(name));
  }
  static Sort adt(std::string name) { return Sort(SortKind::Adt, std::move(name)); }

  SortKind kind() const { return kind_; }
  bool is_bool() const { return kind_ == SortKind::Bool; }
  bool is_adt() const { return kind_ == SortKind::Adt; }
  bool is_uninterpreted() const { return kind_ == SortKind::Uninterpreted; }

  /// Name as written in SMT-LIB ("Bool" for the Boolean sort).
  const std::string& name() const;

  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;

 private:
  Sort(SortKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  SortKind kind_ = SortKind::Bool;
  std::string name_;
};

struct Selector
{
  std::string name;
  Sort sort;
};

struct Constructor
{
  std::string name;
  std::vector<Selector> selectors;

  std::size_t arity() const { return selectors.size(); }
  bool is_constant() const { return selectors.empty(); }
};

struct Datatype
{
  std::string name;
  std::vector<Constructor> constructors;
};

struct ConstructorRef
{
  std::size_t datatype = 0;
  std::size_t index = 0;
  friend bool operator==(const ConstructorRef&, const ConstructorRef&) = default;
};

struct SelectorRef
{
  std::size_t datatype = 0;
  std::size_t constructor = 0;
  std::size_t index = 0;
  friend bool operator==(const SelectorRef&, const SelectorRef&) = default;
};

/// The declared algebraic datatypes: constructors, their selectors and the
/// implicit one-tester-per-constructor. Constructor and selector names are
/// unique across all datatypes.
class AdtSignature
{
 public:
  /// Adds a block of datatypes that may refer to each other and to datatypes
  /// of earlier blocks. Validates name uniqueness, non-emptiness and
  /// inhabitation; throws Error(Sort) and leaves the signature unchanged on
  /// failure.
  void add_block(std::vector<Datatype> block);

  const std::vector<Datatype>& datatypes() const { return datatypes_; }
  const Datatype& datatype(std::size_t index) const { return datatypes_.at(index); }
  std::optional<std::size_t> find(std::string_view name) const;
  const Datatype& datatype(std::string_view name) const;

  std::optional<ConstructorRef> constructor(std::string_view name) const;
  std::optional<SelectorRef> selector(std::string_view name) const;

  const Constructor& constructor(ConstructorRef ref) const;
  const Selector& selector(SelectorRef ref) const;
  const Constructor& constructor_of(SelectorRef ref) const;

  bool empty() const { return datatypes_.empty(); }

 private:
  std::vector<Datatype> datatypes_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::unordered_map<std::string, ConstructorRef> constructors_;
  std::unordered_map<std::string, SelectorRef> selectors_;
};

/// Names of datatypes in `block` that cannot build any finite value, given
/// that everything outside `block` is inhabited. Least-fixpoint analysis.
std::vector<std::string> uninhabited_datatypes(const std::vector<Datatype>& block);

struct FunctionDecl
{
  std::string name;
  std::vector<Sort> domain;
  Sort range;
};

enum class SymbolKind : std::uint8_t { Variable, Function, Constructor, Selector };

/// Everything a script declares: uninterpreted sorts, datatypes, uninterpreted
/// functions and constants (variables), in declaration order.
class Signature
{
 public:
  void declare_sort(const std::string& name);
  void declare_datatypes(std::vector<Datatype> block);
  /// Arity-0 declarations become variables.
  void declare_function(FunctionDecl decl);

  bool has_sort(std::string_view name) const;
  /// Resolves a sort name: Bool, a declared uninterpreted sort, or a datatype.
  std::optional<Sort> resolve_sort(std::string_view name) const;

  std::optional<SymbolKind> symbol_kind(std::string_view name) const;
  const FunctionDecl* function(std::string_view name) const;
  const FunctionDecl* variable(std::string_view name) const;

  const std::vector<std::string>& uninterpreted_sorts() const { return sorts_; }
  const AdtSignature& adts() const { return adts_; }
  const std::vector<FunctionDecl>& functions() const { return functions_; }
  const std::vector<FunctionDecl>& variables() const { return variables_; }

  /// Returns prefix + counter, never previously declared.
  std::string fresh_name(std::string_view prefix);

 private:
  void claim_symbol(const std::string& name, SymbolKind kind);

  std::vector<std::string> sorts_;
  AdtSignature adts_;
  std::vector<FunctionDecl> functions_;
  std::vector<FunctionDecl> variables_;
  std::unordered_map<std::string, SymbolKind> symbols_;
  std::unordered_map<std::string, std::size_t> function_index_;
  std::unordered_map<std::string, std::size_t> variable_index_;
  std::unordered_map<std::string, std::size_t> fresh_counters_;
};

enum class TermKind : std::uint8_t {
  True,
  False,
  Variable,
  Constructor,  // symbol = constructor name
  Selector,     // symbol = selector name
  Tester,       // symbol = constructor name
  Apply,        // uninterpreted function, arity >= 1
  Equal,
  Distinct,
  Not,
  And,
  Or,
  Implies,
  Ite,
};

struct TermNode;

/// Handle to an interned term. Two handles are equal iff they denote the
/// same structural term of the same TermManager.
class Term
{
 public:
  Term() = default;

  explicit operator bool() const { return node_ != nullptr; }

  std::uint32_t id() const;
  TermKind kind() const;
  const Sort& sort() const;
  const std::string& symbol() const;
  std::span<const Term> args() const;
  const Term& operator[](std::size_t i) const { return args()[i]; }

  bool is_var() const { return kind() == TermKind::Variable; }
  /// Variables, Boolean constants and nullary constructors.
  bool is_leaf() const { return args().empty(); }

  friend bool operator==(Term a, Term b) { return a.node_ == b.node_; }

 private:
  friend class TermManager;
  explicit Term(const TermNode* node) : node_(node) {}
  const TermNode* node_ = nullptr;
};

struct TermNode
{
  std::uint32_t id;
  TermKind kind;
  std::string symbol;
  Sort sort;
  std::vector<Term> args;
};

struct TermHash
{
  std::size_t operator()(Term t) const { return t ? t.id() : 0; }
};

/// Owns the signature of one query session together with its hash-consing
/// table. Not thread-safe; one manager per pipeline run.
class TermManager
{
 public:
  TermManager() = default;
  explicit TermManager(Signature signature) : signature_(std::move(signature)) {}
  TermManager(const TermManager&) = delete;
  TermManager& operator=(const TermManager&) = delete;

  Signature& signature() { return signature_; }
  const Signature& signature() const { return signature_; }

  Term mk_true();
  Term mk_false();
  Term mk_bool(bool value) { return value ? mk_true() : mk_false(); }

  /// Declared variable (0-ary function).
  Term mk_var(std::string_view name);
  /// Declares a fresh variable named prefix + counter.
  Term mk_fresh_var(std::string_view prefix, const Sort& sort);

  /// Generic application by symbol: constructor, selector, uninterpreted
  /// function, or variable when `args` is empty.
  Term mk_app(std::string_view symbol, std::vector<Term> args);
  Term mk_constructor(std::string_view name, std::vector<Term> args);
  Term mk_selector(std::string_view name, Term arg);
  Term mk_tester(std::string_view constructor, Term arg);
  Term mk_apply(std::string_view function, std::vector<Term> args);

  Term mk_eq(Term a, Term b);
  Term mk_distinct(std::vector<Term> args);
  Term mk_not(Term a);
  /// Empty conjunction is true; singleton is its element.
  Term mk_and(std::vector<Term> args);
  Term mk_or(std::vector<Term> args);
  Term mk_implies(Term a, Term b);
  Term mk_iff(Term a, Term b) { return mk_eq(a, b); }
  Term mk_ite(Term cond, Term then_term, Term else_term);

  /// Same operator and symbol as `t`, applied to `args`.
  Term mk_app_like(Term t, std::vector<Term> args);

  /// Number of interned nodes.
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Key
  {
    TermKind kind;
    std::string symbol;
    Sort sort;
    std::vector<std::uint32_t> args;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash
  {
    std::size_t operator()(const Key& key) const;
  };

  Term intern(TermKind kind, std::string symbol, Sort sort, std::vector<Term> args);
  void require_bool(Term t, std::string_view context) const;

  Signature signature_;
  std::deque<TermNode> nodes_;
  std::unordered_map<Key, Term, KeyHash> table_;
};

/// SMT-LIB rendering for diagnostics. No sharing; output is truncated after
/// `limit` characters.
std::string to_smtlib(Term t, std::size_t limit = 4096);

/// Symbol rendering: simple symbols verbatim, everything else |quoted|.
std::string quote_symbol(std::string_view name);

/// A value of a datatype: a constructor applied to normal children. Boolean
/// fields hold the pseudo-constructors "true" / "false".
struct NormalTerm
{
  std::string constructor;
  std::vector<NormalTerm> children;

  /// Constants have depth 0; f(children) has 1 + max child depth.
  std::size_t depth() const;
  std::string to_string() const;

  friend bool operator==(const NormalTerm&, const NormalTerm&) = default;
  /// Lexicographic on (constructor, children).
  friend bool operator<(const NormalTerm& a, const NormalTerm& b);
};

/// Visits every well-sorted selector sequence applicable from `start`, of
/// length 1..max_length, depth-first in declaration order of constructors
/// and selectors. The visitor receives the path and returns false to skip
/// the extensions of that path.
void for_each_selector_chain(const AdtSignature& adts, const Sort& start,
                             std::size_t max_length,
                             const std::function<bool(std::span<const SelectorRef>)>& visit);

struct SelectorChain
{
  Term term;                // f_l(...f_1(x)...)
  std::vector<Term> guards; // is-f_1(x), is-f_2(f_1(x)), ...
};

/// All selector chains of length exactly `length` starting at `x`.
std::vector<SelectorChain> child_depth_terms(TermManager& tm, Term x, std::size_t length);

}  // namespace adteager
