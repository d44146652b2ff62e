#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adteager/backend.h"
#include "adteager/depth.h"
#include "adteager/reduce.h"
#include "adteager/verdict.h"

namespace adteager {

/// Result of running the reduction pipeline on one script.
struct Reduction
{
  std::string uf_text;
  DepthMap depths;
  ReduceStats stats;
};

/// parse, desugar ite, flatten, reduce, print.
Reduction reduce_text(std::string_view smt, const ReduceOptions& options = {});

std::string read_file(const std::filesystem::path& path);

struct SolveResult
{
  Verdict verdict;
  Reduction reduction;
};

/// Reduces `smt` and runs `backend` on the result. Elapsed time covers both.
SolveResult solve_text(std::string_view smt, const BackendConfig& backend,
                       const ReduceOptions& options = {});
SolveResult solve_file(const std::filesystem::path& path, const BackendConfig& backend,
                       const ReduceOptions& options = {});

/// 0 for sat/unsat, 2 for unknown.
int exit_code(Answer answer);

// ---------------------------------------------------------------------------
// Benchmarking

struct RunRecord
{
  std::string query;
  std::string solver;
  Answer verdict = Answer::Unknown;
  double seconds = 0.0;
  bool timeout = false;
};

/// One entry of a solver config file. With `reduce` the query is reduced
/// first and the command sees the UF script; otherwise it gets the input
/// file unchanged.
struct SolverSpec
{
  BackendConfig backend;
  bool reduce = true;
};

/// Reads a JSON array of {"name", "command"[, "reduce"]} objects.
std::vector<SolverSpec> load_solvers(const std::filesystem::path& path);

struct Disagreement
{
  std::string query;
  std::string sat_solver;
  std::string unsat_solver;
};

struct BenchResult
{
  std::vector<RunRecord> records;  // sorted by (query, solver)
  std::vector<Disagreement> disagreements;

  bool fatal() const { return !disagreements.empty(); }
};

/// Runs every solver on every `.smt2` file under `dir` (recursively), up to
/// `jobs` runs at a time. Reduction failures count as Unknown.
BenchResult bench(const std::filesystem::path& dir, const std::vector<SolverSpec>& solvers,
                  double timeout, std::size_t jobs = 1);

std::vector<Disagreement> find_disagreements(const std::vector<RunRecord>& records);

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(std::istream& in);

struct ContributionRow
{
  std::string solver;
  std::size_t solved = 0;
  double solved_percent = 0.0;
  std::size_t vb_with = 0;
  std::size_t vb_without = 0;
};

/// Virtual-best contribution per solver, most important first. Throws
/// Error(Invalid) when solvers were not run on the same queries.
std::vector<ContributionRow> contribution_rank(const std::vector<RunRecord>& records);

std::string format_rank(const std::vector<ContributionRow>& rows);

}  // namespace adteager
