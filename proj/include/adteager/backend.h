#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adteager/ir.h"
#include "adteager/preprocess.h"
#include "adteager/verdict.h"

namespace adteager {

/// An external solver. `command` is run through /bin/sh; the query file path
/// replaces every `{file}`, or is appended when the placeholder is absent.
struct BackendConfig
{
  std::string name = "backend";
  std::string command;
  double timeout = 1200.0;  // seconds
};

/// Backend from ADT_EAGER_BACKEND, else z3 or cvc5 found on PATH.
std::optional<BackendConfig> default_backend();

/// Writes `uf_text` to a temporary .smt2 file, runs the backend on it and
/// maps its stdout to a verdict. The process group is killed on timeout.
/// Throws Error(Backend) when the command cannot be started at all.
Verdict run_backend(const BackendConfig& config, std::string_view uf_text);

// ---------------------------------------------------------------------------
// Bounded model search over normal terms.

struct OracleOptions
{
  /// Largest per-sort candidate set at one depth.
  std::size_t max_domain = 20000;
  /// Search nodes before giving up with Unknown("resource").
  std::uint64_t max_nodes = 2'000'000;
};

/// A value chosen for a selector applied to a term built by another
/// constructor.
struct SelectorChoice
{
  std::string selector;
  NormalTerm argument;
  NormalTerm value;  // constructor "" marks a value unequal to every other
};

struct Witness
{
  std::map<std::string, NormalTerm> values;  // Bool variables hold true/false
  std::vector<SelectorChoice> choices;
};

struct OracleResult
{
  Verdict verdict;
  std::optional<Witness> witness;
  /// Smallest bound at which exhaustion is reported as Unsat.
  std::size_t required_bound = 0;
  /// Largest depth of a value in the witness.
  std::size_t witness_depth = 0;
};

/// Enumerates assignments of normal terms of depth <= `depth_bound`
/// (iterative deepening). Exhaustion is Unsat when the bound covers the
/// depth a model would need (variable count plus the depth giving every
/// sort enough distinct values), else Unknown("bound"). A skeleton that
/// is false under every assignment (x != x) is Unsat at any bound. Throws
/// Error(Fragment) for queries with uninterpreted sorts or functions.
OracleResult oracle_solve(const FlatQuery& query, std::size_t depth_bound,
                          const OracleOptions& options = {});

/// Two-valued evaluation of the query under a witness.
bool evaluate_witness(const FlatQuery& query, const Witness& witness);

}  // namespace adteager
