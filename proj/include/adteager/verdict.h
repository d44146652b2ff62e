#pragma once

#include <string>

namespace adteager {

enum class Answer { Sat, Unsat, Unknown };

const char* to_string(Answer answer);

struct Verdict
{
  Answer answer = Answer::Unknown;
  std::string reason;     // diagnostic for Unknown
  double elapsed = 0.0;   // seconds
  std::string source;     // backend label or "oracle"

  bool decided() const { return answer != Answer::Unknown; }
};

}  // namespace adteager
