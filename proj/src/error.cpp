#include "adteager/error.h"

namespace adteager {

const char* to_string(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::Sort: return "sort error";
    case ErrorKind::Unsupported: return "unsupported feature";
    case ErrorKind::ResourceLimit: return "resource limit";
    case ErrorKind::Backend: return "backend error";
    case ErrorKind::Fragment: return "fragment violation";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Invalid: return "invalid argument";
  }
  return "error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& module,
                     const std::string& message, std::size_t line,
                     std::size_t column)
{
  std::string out = module + ": " + to_string(kind);
  if (line > 0)
  {
    out += " at " + std::to_string(line) + ":" + std::to_string(column);
  }
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string module, const std::string& message,
             std::size_t line, std::size_t column)
    : std::runtime_error(decorate(kind, module, message, line, column)),
      kind_(kind),
      module_(std::move(module)),
      line_(line),
      column_(column)
{
}

}  // namespace adteager
