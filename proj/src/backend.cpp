#include "adteager/backend.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>

#include "adteager/error.h"
#include "adteager/frontend.h"

namespace adteager {

namespace {

constexpr std::size_t kMaxCapture = 1 << 20;

[[noreturn]] void backend_error(const std::string& message)
{
  throw Error(ErrorKind::Backend, "backend", message);
}

std::string shell_quote(const std::string& s)
{
  std::string out = "'";
  for (char c : s)
  {
    if (c == '\'')
    {
      out += "'\\''";
    }
    else
    {
      out += c;
    }
  }
  return out + "'";
}

bool on_path(const std::string& program)
{
  const char* path = std::getenv("PATH");
  if (path == nullptr)
  {
    return false;
  }
  std::string_view rest(path);
  while (true)
  {
    std::size_t colon = rest.find(':');
    std::string dir(rest.substr(0, colon));
    if (dir.empty())
    {
      dir = ".";
    }
    std::string candidate = dir + "/" + program;
    if (::access(candidate.c_str(), X_OK) == 0)
    {
      return true;
    }
    if (colon == std::string_view::npos)
    {
      return false;
    }
    rest.remove_prefix(colon + 1);
  }
}

class TempFile
{
 public:
  explicit TempFile(std::string_view contents)
  {
    const char* dir = std::getenv("TMPDIR");
    std::string pattern = std::string(dir != nullptr && *dir != '\0' ? dir : "/tmp") +
                          "/adt-eager-XXXXXX.smt2";
    std::vector<char> buffer(pattern.begin(), pattern.end());
    buffer.push_back('\0');
    int fd = ::mkstemps(buffer.data(), 5);
    if (fd < 0)
    {
      throw Error(ErrorKind::Io, "backend",
                  std::string("cannot create temporary file: ") + std::strerror(errno));
    }
    path_ = buffer.data();
    std::size_t written = 0;
    while (written < contents.size())
    {
      ssize_t n = ::write(fd, contents.data() + written, contents.size() - written);
      if (n < 0)
      {
        if (errno == EINTR)
        {
          continue;
        }
        int saved = errno;
        ::close(fd);
        ::unlink(path_.c_str());
        throw Error(ErrorKind::Io, "backend",
                    "cannot write " + path_ + ": " + std::strerror(saved));
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() { ::unlink(path_.c_str()); }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProcessResult
{
  std::string out;
  std::string err;
  bool timed_out = false;
  int status = 0;
};

ProcessResult run_shell(const std::string& command, double timeout)
{
  int out_pipe[2];
  int err_pipe[2];
  int exec_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0 ||
      ::pipe2(exec_pipe, O_CLOEXEC) != 0)
  {
    backend_error(std::string("pipe: ") + std::strerror(errno));
  }
  const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
  pid_t pid = ::fork();
  if (pid < 0)
  {
    int saved = errno;
    for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1], exec_pipe[0], exec_pipe[1]})
    {
      ::close(fd);
    }
    backend_error(std::string("fork: ") + std::strerror(saved));
  }
  if (pid == 0)
  {
    ::setpgid(0, 0);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0)
    {
      ::dup2(devnull, STDIN_FILENO);
    }
    ::execv("/bin/sh", const_cast<char* const*>(argv));
    int code = errno;
    ssize_t ignored = ::write(exec_pipe[1], &code, sizeof code);
    (void)ignored;
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::close(exec_pipe[1]);

  int exec_errno = 0;
  ssize_t got = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno);
  ::close(exec_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof exec_errno))
  {
    ::waitpid(pid, nullptr, 0);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    backend_error(std::string("cannot execute /bin/sh: ") + std::strerror(exec_errno));
  }

  ProcessResult result;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(timeout));
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  int open_fds = 2;
  char buffer[4096];
  while (open_fds > 0)
  {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline)
    {
      result.timed_out = true;
      break;
    }
    auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    int ready = ::poll(fds, 2, static_cast<int>(std::min<long long>(wait + 1, 1000)));
    if (ready < 0)
    {
      if (errno == EINTR)
      {
        continue;
      }
      break;
    }
    for (int i = 0; i < 2; ++i)
    {
      if (fds[i].fd < 0 || (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0)
      {
        continue;
      }
      ssize_t n = ::read(fds[i].fd, buffer, sizeof buffer);
      if (n > 0)
      {
        std::string& sink = i == 0 ? result.out : result.err;
        if (sink.size() < kMaxCapture)
        {
          sink.append(buffer, static_cast<std::size_t>(n));
        }
      }
      else if (n == 0 || errno != EINTR)
      {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  ::killpg(pid, SIGKILL);
  for (pollfd& p : fds)
  {
    if (p.fd >= 0)
    {
      ::close(p.fd);
    }
  }
  while (::waitpid(pid, &result.status, 0) < 0 && errno == EINTR)
  {
  }
  return result;
}

std::string first_line(const std::string& text)
{
  std::size_t start = text.find_first_not_of(" \t\r\n");
  if (start == std::string::npos)
  {
    return "";
  }
  std::size_t end = text.find('\n', start);
  return text.substr(start, std::min<std::size_t>(end - start, 300));
}

}  // namespace

std::optional<BackendConfig> default_backend()
{
  const char* env = std::getenv("ADT_EAGER_BACKEND");
  if (env != nullptr && *env != '\0')
  {
    return BackendConfig{"backend", env, 1200.0};
  }
  if (on_path("z3"))
  {
    return BackendConfig{"z3", "z3 {file}", 1200.0};
  }
  if (on_path("cvc5"))
  {
    return BackendConfig{"cvc5", "cvc5 {file}", 1200.0};
  }
  return std::nullopt;
}

Verdict run_backend(const BackendConfig& config, std::string_view uf_text)
{
  if (!(config.timeout > 0))
  {
    throw Error(ErrorKind::Invalid, "backend", "timeout must be positive");
  }
  if (config.command.find_first_not_of(" \t") == std::string::npos)
  {
    backend_error("empty backend command");
  }
  TempFile file(uf_text);
  std::string command = config.command;
  std::string quoted = shell_quote(file.path());
  if (command.find("{file}") == std::string::npos)
  {
    command += " " + quoted;
  }
  else
  {
    std::size_t pos = 0;
    while ((pos = command.find("{file}", pos)) != std::string::npos)
    {
      command.replace(pos, 6, quoted);
      pos += quoted.size();
    }
  }

  auto start = std::chrono::steady_clock::now();
  ProcessResult run = run_shell(command, config.timeout);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!run.timed_out && WIFEXITED(run.status) &&
      (WEXITSTATUS(run.status) == 127 || WEXITSTATUS(run.status) == 126) &&
      run.out.find_first_not_of(" \t\r\n") == std::string::npos)
  {
    backend_error("cannot run '" + config.command + "': " + first_line(run.err));
  }

  Verdict v = parse_backend_output(run.out);
  if (run.timed_out)
  {
    v = Verdict{Answer::Unknown, "timeout", 0.0, ""};
  }
  else if (!v.decided() && WIFSIGNALED(run.status))
  {
    v.reason = "crashed with signal " + std::to_string(WTERMSIG(run.status));
  }
  else if (!v.decided() && v.reason == "no output" && !run.err.empty())
  {
    v.reason = "no output; stderr: " + first_line(run.err);
  }
  v.elapsed = elapsed;
  v.source = config.name;
  return v;
}

}  // namespace adteager
