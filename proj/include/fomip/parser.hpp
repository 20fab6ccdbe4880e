#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fomip/diagnostics.hpp"
#include "fomip/model.hpp"

namespace fomip {

struct SourceModel {
  std::string text;
  std::string path = "<memory>";
};

struct ParseResult {
  // Present iff diagnostics contain no Error.
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

// Parses and validates a .fomip source. Never throws on malformed
// input; all problems come back as diagnostics.
ParseResult parse_model(const SourceModel& src);

// Structural re-validation of an already built Model: declarations,
// rule safety, bound sanity. Spans refer to the model, not a file.
std::vector<Diagnostic> validate_model(const Model& m);

// Canonical source text; parse_model(print_model(m)) reproduces m.
std::string print_model(const Model& m);

}  // namespace fomip
