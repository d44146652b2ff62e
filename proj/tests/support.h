#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <string_view>
#include <sys/wait.h>
#include <unistd.h>

#include "adteager/backend.h"
#include "adteager/frontend.h"
#include "adteager/preprocess.h"

namespace adteager::testing {

inline constexpr std::string_view kTowerDecl =
    "(declare-datatypes ((block 0) (tower 0))\n"
    "  (((A) (B))\n"
    "   ((Empty) (Stack (top block) (rest tower)))))\n";

inline constexpr std::string_view kCycleQuery =
    "(declare-datatypes ((block 0) (tower 0))\n"
    "  (((A) (B)) ((Empty) (Stack (top block) (rest tower)))))\n"
    "(declare-const x tower)\n"
    "(declare-const y tower)\n"
    "(assert (and ((_ is Stack) x) ((_ is Stack) y) (= y (rest x)) (= x (rest y))))\n"
    "(check-sat)\n";

/// enum / rec1 / rec2 from the finite-universe discussion.
inline constexpr std::string_view kFiniteDecl =
    "(declare-datatypes ((enum 0) (rec1 0) (rec2 0))\n"
    "  (((a) (b))\n"
    "   ((j (l enum) (r enum)))\n"
    "   ((k (left rec1) (right rec1)))))\n";

inline constexpr std::string_view kTreeDecl =
    "(declare-datatypes ((tree 0))\n"
    "  (((leaf) (node (lc tree) (rc tree)))))\n";

inline FlatQuery flat(std::string_view text)
{
  return flatten(desugar_ite(parse_script(text)));
}

inline bool have_z3()
{
#ifdef ADTEAGER_Z3
  return ::access(ADTEAGER_Z3, X_OK) == 0;
#else
  return false;
#endif
}

inline BackendConfig z3_backend(double timeout = 60.0)
{
#ifdef ADTEAGER_Z3
  return BackendConfig{"z3", std::string(ADTEAGER_Z3) + " {file}", timeout};
#else
  return BackendConfig{"z3", "z3 {file}", timeout};
#endif
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag)
{
  auto dir = std::filesystem::temp_directory_path() /
             ("adteager-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Captured
{
  int status = -1;
  std::string out;
};

/// Runs `command` through the shell, capturing stdout.
inline Captured run_command(const std::string& command)
{
  Captured c;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr)
  {
    return c;
  }
  char buffer[4096];
  std::size_t n;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0)
  {
    c.out.append(buffer, n);
  }
  int raw = ::pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

}  // namespace adteager::testing
