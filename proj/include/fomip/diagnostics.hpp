#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fomip {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;
  int column = 1;
  int length = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

// "path:line:col: severity: message"
std::string format_diagnostic(const std::string& path, const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace fomip
