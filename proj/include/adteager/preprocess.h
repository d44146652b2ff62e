#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "adteager/frontend.h"
#include "adteager/ir.h"

namespace adteager {

inline constexpr std::string_view kFlatPrefix = "algb!flat!";
inline constexpr std::string_view kItePrefix = "algb!ite!";

enum class LiteralKind : std::uint8_t {
  Eq,    // x = y
  Neq,   // not (x = y)
  Def,   // x = g(x1, ..., xn)
  Pred,  // Boolean application p(x1, ..., xn) used directly as an atom
};

/// A flat theory literal. All arguments of `app` are variables.
struct FlatLiteral
{
  LiteralKind kind = LiteralKind::Eq;
  Term var;  // left variable; unset for Pred
  Term rhs;  // right variable (Eq, Neq) or application (Def, Pred)

  friend bool operator==(const FlatLiteral&, const FlatLiteral&) = default;
};

enum class NodeKind : std::uint8_t { True, False, Literal, BoolVar, Not, And, Or, Implies, Iff };

struct SkeletonNode
{
  NodeKind kind = NodeKind::True;
  std::size_t literal = 0;  // Literal
  Term var;                 // BoolVar
  std::vector<std::size_t> children;
};

/// Boolean skeleton over flat literals. Nodes form a DAG; children precede
/// their parents in `nodes`.
struct FlatQuery
{
  std::shared_ptr<TermManager> terms;
  /// Variables occurring in the query (fresh ones included), in declaration
  /// order.
  std::vector<Term> vars;
  std::vector<FlatLiteral> literals;
  std::vector<SkeletonNode> nodes;
  std::size_t root = 0;
  std::size_t fresh_variables = 0;
  std::size_t application_nodes = 0;

  const Signature& signature() const { return terms->signature(); }
  /// Variables of datatype sort.
  std::vector<Term> adt_vars() const;
};

/// Replaces every ite of non-Boolean sort by a fresh variable v with
/// (c => v = a) and (not c => v = b); Boolean ite becomes
/// (c and a) or (not c and b). Shares the term manager of `script`.
Script desugar_ite(const Script& script);

/// Flattens an ite-free script. Nested applications get fresh variables
/// defined at the top level. Throws Error(Invalid) when an ite remains.
FlatQuery flatten(const Script& script);

/// Renders a flat query back to a script over the same term manager.
Script to_script(const FlatQuery& query);

/// The term a literal stands for.
Term literal_term(TermManager& tm, const FlatLiteral& literal);

/// Number of distinct compound or constructor nodes reachable from the
/// assertions.
std::size_t count_application_nodes(const std::vector<Term>& roots);

}  // namespace adteager
