#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "adteager/backend.h"
#include "adteager/blocksworld.h"
#include "adteager/error.h"
#include "adteager/harness.h"

namespace {

using namespace adteager;

constexpr int kDisagreementExit = 3;

void write_text(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-")
  {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out)
  {
    throw Error(ErrorKind::Io, "harness", "cannot write " + path);
  }
}

BackendConfig pick_backend(const std::string& command, double timeout)
{
  BackendConfig cfg;
  if (!command.empty())
  {
    cfg.command = command;
  }
  else if (auto found = default_backend())
  {
    cfg = *found;
  }
  else
  {
    throw Error(ErrorKind::Backend, "backend",
                "no backend found; set ADT_EAGER_BACKEND or pass --backend");
  }
  cfg.timeout = timeout;
  return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Eager reduction of algebraic data type queries to uninterpreted functions"};
  app.require_subcommand(1);

  std::string file;
  std::string backend_cmd;
  double timeout = 1200.0;
  bool dump_depths = false;
  bool dump_stats = false;
  auto* solve = app.add_subcommand("solve", "Decide an SMT-LIB query");
  solve->add_option("file", file, "Input .smt2 file")->required();
  solve->add_option("--backend", backend_cmd, "Backend command; {file} is the query path");
  solve->add_option("--timeout", timeout, "Backend timeout in seconds")
      ->check(CLI::PositiveNumber);
  solve->add_flag("--dump-depths", dump_depths, "Print the per-ADT depth bounds");
  solve->add_flag("--dump-stats", dump_stats, "Print reduction statistics as JSON");

  std::string output;
  auto* reduce_cmd = app.add_subcommand("reduce", "Print the reduced UF query");
  reduce_cmd->add_option("file", file, "Input .smt2 file")->required();
  reduce_cmd->add_option("-o,--output", output, "Output file (default stdout)");
  reduce_cmd->add_flag("--dump-stats", dump_stats, "Print reduction statistics to stderr");

  std::string dir;
  std::string solvers_path;
  std::size_t jobs = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Run solvers over a directory of queries");
  bench_cmd->add_option("dir", dir, "Directory of .smt2 files")->required();
  bench_cmd->add_option("--solvers", solvers_path, "Solver config (JSON)")->required();
  bench_cmd->add_option("--timeout", timeout, "Per-run timeout in seconds")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  bench_cmd->add_option("-o,--output", output, "CSV output (default stdout)");

  std::string csv_path;
  auto* rank_cmd = app.add_subcommand("rank", "Virtual-best contribution ranking");
  rank_cmd->add_option("csv", csv_path, "Results CSV from bench")->required();

  std::size_t block_count = 3;
  std::size_t steps = 3;
  std::uint64_t seed = 0;
  bool at_most = false;
  auto* gen_cmd = app.add_subcommand("gen-blocksworld", "Generate one blocks-world query");
  gen_cmd->add_option("--blocks", block_count, "Number of blocks (2..26)")
      ->check(CLI::Range(blocks::kMinBlocks, blocks::kMaxBlocks));
  gen_cmd->add_option("--steps", steps, "Number of moves")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_flag("--at-most", at_most, "Reach the target in at most --steps moves");
  gen_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  std::size_t count = 500;
  auto* suite_cmd = app.add_subcommand("gen-suite", "Generate a blocks-world benchmark suite");
  suite_cmd->add_option("--count", count, "Number of queries");
  suite_cmd->add_option("--seed", seed, "Random seed");
  suite_cmd->add_option("-d,--dir", dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*solve)
    {
      BackendConfig cfg = pick_backend(backend_cmd, timeout);
      SolveResult r = solve_file(file, cfg);
      if (dump_depths)
      {
        std::cout << format_depths(r.reduction.depths);
      }
      if (dump_stats)
      {
        std::cout << r.reduction.stats.to_json() << "\n";
      }
      std::cout << to_string(r.verdict.answer) << "\n";
      if (!r.verdict.decided() && !r.verdict.reason.empty())
      {
        std::cerr << "unknown: " << r.verdict.reason << "\n";
      }
      return exit_code(r.verdict.answer);
    }
    if (*reduce_cmd)
    {
      Reduction r = reduce_text(read_file(file));
      write_text(output, r.uf_text);
      if (dump_stats)
      {
        std::cerr << r.stats.to_json() << "\n";
      }
      return 0;
    }
    if (*bench_cmd)
    {
      BenchResult r = bench(dir, load_solvers(solvers_path), timeout, jobs);
      std::ostringstream csv;
      write_csv(csv, r.records);
      write_text(output, csv.str());
      for (const Disagreement& d : r.disagreements)
      {
        std::cerr << "disagreement on " << d.query << ": " << d.sat_solver << " says sat, "
                  << d.unsat_solver << " says unsat\n";
      }
      return r.fatal() ? kDisagreementExit : 0;
    }
    if (*rank_cmd)
    {
      std::ifstream in(csv_path);
      if (!in)
      {
        throw Error(ErrorKind::Io, "harness", "cannot read " + csv_path);
      }
      std::cout << format_rank(contribution_rank(read_csv(in)));
      return 0;
    }
    if (*gen_cmd)
    {
      blocks::BlocksQuery q = blocks::encode_query(blocks::generate_setup(block_count, seed), steps,
                                                   at_most);
      write_text(output, q.text);
      return 0;
    }
    if (*suite_cmd)
    {
      blocks::write_suite(blocks::generate_suite(count, seed), dir);
      return 0;
    }
  }
  catch (const Error& e)
  {
    std::cerr << e.what() << "\n";
    return 1;
  }
  catch (const std::exception& e)
  {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
