#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "adteager/blocksworld.h"
#include "adteager/verdict.h"

namespace adteager::testing {

struct RandomQueryOptions
{
  std::size_t max_vars = 4;
  std::size_t max_adts = 2;
  std::size_t max_constructors = 3;
  std::size_t max_arity = 2;
  std::size_t max_atoms = 5;
  /// Allow nested applications instead of variables as arguments.
  bool nested = false;
};

/// A random well-sorted SMT-LIB query over freshly generated datatypes.
/// Flat unless `nested` is set.
std::string random_query(blocks::Prng& rng, const RandomQueryOptions& options = {});

struct DifferentialOutcome
{
  Answer oracle = Answer::Unknown;
  Answer reduced = Answer::Unknown;
  Answer native = Answer::Unknown;  // backend on the original ADT query
  std::size_t bound = 0;
  /// The reduction exceeded `max_axioms`; `reduced` stays Unknown.
  bool too_large = false;
};

/// Oracle (bounded search on the flattened query), backend on the reduced
/// query and backend on the original query. `max_bound` caps the oracle,
/// `max_axioms` the acyclicality instances of the reduction.
DifferentialOutcome differential(const std::string& query, const std::string& backend_command,
                                 std::size_t max_bound, bool run_native,
                                 std::size_t max_axioms = 2'000'000);

/// Applies 1..4 random edits (byte and token level) to `seed_text`.
std::string mutate(blocks::Prng& rng, const std::string& seed_text);

/// Valid queries used as the fuzz seed corpus.
std::vector<std::string> fuzz_seeds();

}  // namespace adteager::testing
