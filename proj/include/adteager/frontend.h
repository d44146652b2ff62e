#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adteager/ir.h"
#include "adteager/verdict.h"

namespace adteager {

/// A parsed query. Declarations live in the term manager's signature (in
/// declaration order); `assertions` keeps the asserted formulas in order.
struct Script
{
  std::shared_ptr<TermManager> terms = std::make_shared<TermManager>();
  std::string logic;
  std::vector<Term> assertions;
  bool check_sat = false;
  std::vector<std::string> warnings;

  const Signature& signature() const { return terms->signature(); }
};

struct ParseOptions
{
  /// Accept symbols containing the reserved `algb!` prefix. Used when
  /// re-reading output this tool printed itself.
  bool allow_reserved_symbols = false;
  /// Maximum s-expression nesting depth.
  std::size_t max_depth = 2000;
};

/// Parses the supported SMT-LIB 2.6 subset (QF_DT / QF_UFDT). `match` is
/// desugared to testers and selectors, `define-fun` is inlined, `let` is
/// expanded. Throws Error on malformed, ill-sorted or unsupported input.
Script parse_script(std::string_view text, const ParseOptions& options = {});

/// Prints a script over Booleans, uninterpreted sorts and uninterpreted
/// functions as QF_UF SMT-LIB text. Large repeated subterms are shared
/// through nullary define-funs. Deterministic.
std::string print_uf_script(const Script& script);

/// Maps solver stdout to a verdict: the first line that is neither blank
/// nor a comment decides.
Verdict parse_backend_output(std::string_view text);

}  // namespace adteager
