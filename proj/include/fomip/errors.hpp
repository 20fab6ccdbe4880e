#pragma once

#include <stdexcept>
#include <string>

namespace fomip {

enum class Errc {
  BothBoundsAbsent,
  LbExceedsUb,
  InvalidBound,
  UnknownFunctor,
  InvalidVarBounds,
  GroundAtomNotDeclared,
  GroundSizeExceeded,
  EnumSizeExceeded,
  NumericalFailure,
  IterationLimit,
  NameCollision,
  NoFractionalVariable,
  BadConfig,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

// Raised when a solve hits a node/round cap. Carries the best proven
// bound and incumbent value so callers can still report a gap.
class IterationLimitError : public Error {
public:
  IterationLimitError(const std::string& msg, double bound, bool has_incumbent,
                      double incumbent)
      : Error(Errc::IterationLimit, msg),
        bound(bound),
        has_incumbent(has_incumbent),
        incumbent(incumbent) {}

  double bound;
  bool has_incumbent;
  double incumbent;

  double gap() const { return has_incumbent ? incumbent - bound : 0.0; }
};

}  // namespace fomip
