#include "adteager/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "adteager/error.h"
#include "adteager/frontend.h"
#include "adteager/preprocess.h"

namespace adteager {

namespace {

[[noreturn]] void invalid(const std::string& message)
{
  throw Error(ErrorKind::Invalid, "harness", message);
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos)
  {
    return s;
  }
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"')
    {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no)
{
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i)
  {
    char c = line[i];
    if (quoted)
    {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
      {
        fields.back() += '"';
        ++i;
      }
      else if (c == '"')
      {
        quoted = false;
      }
      else
      {
        fields.back() += c;
      }
    }
    else if (c == '"' && fields.back().empty())
    {
      quoted = true;
    }
    else if (c == ',')
    {
      fields.emplace_back();
    }
    else if (c != '\r')
    {
      fields.back() += c;
    }
  }
  if (quoted)
  {
    throw Error(ErrorKind::Syntax, "harness", "unterminated quote", line_no, 0);
  }
  return fields;
}

Answer parse_answer(const std::string& s, std::size_t line_no)
{
  if (s == "sat")
  {
    return Answer::Sat;
  }
  if (s == "unsat")
  {
    return Answer::Unsat;
  }
  if (s == "unknown")
  {
    return Answer::Unknown;
  }
  throw Error(ErrorKind::Syntax, "harness", "bad verdict '" + s + "'", line_no, 0);
}

bool solved(const RunRecord& r) { return r.verdict != Answer::Unknown; }

}  // namespace

Reduction reduce_text(std::string_view smt, const ReduceOptions& options)
{
  Script script = parse_script(smt);
  FlatQuery flat = flatten(desugar_ite(script));
  UfQuery uf = reduce(flat, options);
  return Reduction{print_uf_script(uf.script), std::move(uf.depths), uf.stats};
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error(ErrorKind::Io, "harness", "cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SolveResult solve_text(std::string_view smt, const BackendConfig& backend,
                       const ReduceOptions& options)
{
  auto start = std::chrono::steady_clock::now();
  SolveResult result;
  result.reduction = reduce_text(smt, options);
  result.verdict = run_backend(backend, result.reduction.uf_text);
  result.verdict.elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SolveResult solve_file(const std::filesystem::path& path, const BackendConfig& backend,
                       const ReduceOptions& options)
{
  return solve_text(read_file(path), backend, options);
}

int exit_code(Answer answer) { return answer == Answer::Unknown ? 2 : 0; }

std::vector<SolverSpec> load_solvers(const std::filesystem::path& path)
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse(read_file(path));
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::Syntax, "harness", path.string() + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty())
  {
    invalid(path.string() + ": expected a non-empty array of solvers");
  }
  std::vector<SolverSpec> out;
  std::set<std::string> names;
  for (const auto& entry : doc)
  {
    if (!entry.is_object() || !entry.contains("name") || !entry.contains("command") ||
        !entry["name"].is_string() || !entry["command"].is_string())
    {
      invalid(path.string() + ": each solver needs string fields name and command");
    }
    SolverSpec spec;
    spec.backend.name = entry["name"].get<std::string>();
    spec.backend.command = entry["command"].get<std::string>();
    if (entry.contains("reduce"))
    {
      if (!entry["reduce"].is_boolean())
      {
        invalid(path.string() + ": reduce must be a boolean");
      }
      spec.reduce = entry["reduce"].get<bool>();
    }
    if (spec.backend.name.empty() || !names.insert(spec.backend.name).second)
    {
      invalid(path.string() + ": solver names must be non-empty and unique");
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<Disagreement> find_disagreements(const std::vector<RunRecord>& records)
{
  std::map<std::string, std::pair<std::string, std::string>> seen;  // query -> (sat, unsat)
  std::vector<std::string> order;
  for (const RunRecord& r : records)
  {
    if (!solved(r))
    {
      continue;
    }
    auto [it, inserted] = seen.try_emplace(r.query);
    if (inserted)
    {
      order.push_back(r.query);
    }
    std::string& slot = r.verdict == Answer::Sat ? it->second.first : it->second.second;
    if (slot.empty())
    {
      slot = r.solver;
    }
  }
  std::vector<Disagreement> out;
  for (const std::string& q : order)
  {
    const auto& [sat, unsat] = seen[q];
    if (!sat.empty() && !unsat.empty())
    {
      out.push_back(Disagreement{q, sat, unsat});
    }
  }
  return out;
}

BenchResult bench(const std::filesystem::path& dir, const std::vector<SolverSpec>& solvers,
                  double timeout, std::size_t jobs)
{
  if (solvers.empty())
  {
    invalid("no solvers given");
  }
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
  {
    throw Error(ErrorKind::Io, "harness", dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
  {
    if (entry.is_regular_file() && entry.path().extension() == ".smt2")
    {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  struct Task
  {
    std::size_t file;
    std::size_t solver;
  };
  std::vector<Task> tasks;
  for (std::size_t f = 0; f < files.size(); ++f)
  {
    for (std::size_t s = 0; s < solvers.size(); ++s)
    {
      tasks.push_back(Task{f, s});
    }
  }

  BenchResult result;
  std::mutex collector;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&]() {
    while (true)
    {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size())
      {
        return;
      }
      const Task& task = tasks[i];
      const SolverSpec& spec = solvers[task.solver];
      BackendConfig cfg = spec.backend;
      cfg.timeout = timeout;
      RunRecord record;
      record.query = files[task.file].lexically_relative(dir).generic_string();
      record.solver = cfg.name;
      auto start = std::chrono::steady_clock::now();
      try
      {
        std::string text = read_file(files[task.file]);
        Verdict v = spec.reduce ? solve_text(text, cfg).verdict : run_backend(cfg, text);
        record.verdict = v.answer;
        record.timeout = !v.decided() && v.reason == "timeout";
      }
      catch (const Error& e)
      {
        if (e.kind() == ErrorKind::Backend || e.kind() == ErrorKind::Io)
        {
          std::lock_guard lock(collector);
          if (!failure)
          {
            failure = std::current_exception();
          }
          next = tasks.size();
          return;
        }
        record.verdict = Answer::Unknown;
      }
      record.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::lock_guard lock(collector);
      result.records.push_back(std::move(record));
    }
  };
  std::size_t n = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < n; ++i)
  {
    threads.emplace_back(worker);
  }
  worker();
  for (std::thread& t : threads)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const RunRecord& a, const RunRecord& b) {
                     return std::tie(a.query, a.solver) < std::tie(b.query, b.solver);
                   });
  result.disagreements = find_disagreements(result.records);
  return result;
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records)
{
  out << "query,solver,verdict,seconds,timeout\n";
  for (const RunRecord& r : records)
  {
    char seconds[64];
    std::snprintf(seconds, sizeof seconds, "%.3f", r.seconds);
    out << csv_field(r.query) << ',' << csv_field(r.solver) << ',' << to_string(r.verdict) << ','
        << seconds << ',' << (r.timeout ? "true" : "false") << '\n';
  }
}

std::vector<RunRecord> read_csv(std::istream& in)
{
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || split_csv_line(line, line_no) !=
                                     std::vector<std::string>{"query", "solver", "verdict",
                                                              "seconds", "timeout"})
  {
    throw Error(ErrorKind::Syntax, "harness",
                "expected header query,solver,verdict,seconds,timeout", 1, 0);
  }
  std::vector<RunRecord> out;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    std::vector<std::string> f = split_csv_line(line, line_no);
    if (f.size() != 5)
    {
      throw Error(ErrorKind::Syntax, "harness", "expected 5 fields", line_no, 0);
    }
    RunRecord r;
    r.query = f[0];
    r.solver = f[1];
    r.verdict = parse_answer(f[2], line_no);
    try
    {
      std::size_t used = 0;
      r.seconds = std::stod(f[3], &used);
      if (used != f[3].size())
      {
        throw std::invalid_argument(f[3]);
      }
    }
    catch (const std::exception&)
    {
      throw Error(ErrorKind::Syntax, "harness", "bad seconds '" + f[3] + "'", line_no, 0);
    }
    if (f[4] == "true" || f[4] == "1")
    {
      r.timeout = true;
    }
    else if (f[4] != "false" && f[4] != "0")
    {
      throw Error(ErrorKind::Syntax, "harness", "bad timeout flag '" + f[4] + "'", line_no, 0);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ContributionRow> contribution_rank(const std::vector<RunRecord>& records)
{
  std::map<std::string, std::map<std::string, bool>> by_solver;  // solver -> query -> solved
  for (const RunRecord& r : records)
  {
    auto [it, inserted] = by_solver[r.solver].try_emplace(r.query, solved(r));
    if (!inserted)
    {
      invalid("duplicate record for " + r.solver + " on " + r.query);
    }
  }
  if (by_solver.empty())
  {
    return {};
  }
  std::set<std::string> queries;
  for (const auto& [query, ok] : by_solver.begin()->second)
  {
    queries.insert(query);
  }
  for (const auto& [solver, runs] : by_solver)
  {
    if (runs.size() != queries.size() ||
        !std::all_of(runs.begin(), runs.end(),
                     [&](const auto& run) { return queries.count(run.first) != 0; }))
    {
      invalid("solver " + solver + " was run on a different query set");
    }
  }
  std::map<std::string, std::size_t> solvers_per_query;
  for (const auto& [solver, runs] : by_solver)
  {
    for (const auto& [query, ok] : runs)
    {
      solvers_per_query[query] += ok ? 1 : 0;
    }
  }
  std::size_t vb_with = 0;
  for (const auto& [query, count] : solvers_per_query)
  {
    vb_with += count > 0 ? 1 : 0;
  }
  std::vector<ContributionRow> rows;
  for (const auto& [solver, runs] : by_solver)
  {
    ContributionRow row;
    row.solver = solver;
    row.vb_with = vb_with;
    for (const auto& [query, ok] : runs)
    {
      row.solved += ok ? 1 : 0;
      std::size_t others = solvers_per_query[query] - (ok ? 1 : 0);
      row.vb_without += others > 0 ? 1 : 0;
    }
    row.solved_percent =
        queries.empty() ? 0.0 : 100.0 * static_cast<double>(row.solved) / queries.size();
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ContributionRow& a, const ContributionRow& b) {
    std::size_t da = a.vb_with - a.vb_without;
    std::size_t db = b.vb_with - b.vb_without;
    if (da != db)
    {
      return da > db;
    }
    if (a.solved != b.solved)
    {
      return a.solved > b.solved;
    }
    return a.solver < b.solver;
  });
  return rows;
}

std::string format_rank(const std::vector<ContributionRow>& rows)
{
  std::size_t width = 6;
  for (const ContributionRow& r : rows)
  {
    width = std::max(width, r.solver.size());
  }
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s %7s %8s %8s %11s %12s\n", static_cast<int>(width),
                "solver", "solved", "solved%", "vb-with", "vb-without", "contribution");
  out += line;
  for (const ContributionRow& r : rows)
  {
    std::snprintf(line, sizeof line, "%-*s %7zu %7.2f%% %8zu %11zu %12zu\n",
                  static_cast<int>(width), r.solver.c_str(), r.solved, r.solved_percent,
                  r.vb_with, r.vb_without, r.vb_with - r.vb_without);
    out += line;
  }
  return out;
}

}  // namespace adteager
