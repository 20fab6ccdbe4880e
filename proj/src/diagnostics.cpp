#include "fomip/diagnostics.hpp"

#include <sstream>

namespace fomip {

std::string format_diagnostic(const std::string& path, const Diagnostic& d) {
  std::ostringstream os;
  os << path << ":" << d.line << ":" << d.column << ": "
     << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace fomip
