#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adteager {

enum class ErrorKind {
  Syntax,         // lexical or s-expression structure
  Sort,           // ill-sorted or undeclared
  Unsupported,    // outside the accepted SMT-LIB fragment
  ResourceLimit,  // a configured cap was exceeded
  Backend,        // backend misconfiguration (spawn failure)
  Fragment,       // input outside the oracle fragment
  Io,
  Invalid,        // bad argument to an API call
};

const char* to_string(ErrorKind kind);

/// Structured error raised by every stage of the pipeline. `module()` names
/// the stage that produced it (frontend, ir, preprocess, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message,
        std::size_t line = 0, std::size_t column = 0);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace adteager
