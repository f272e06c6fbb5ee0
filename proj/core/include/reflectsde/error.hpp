#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reflectsde {

enum class Errc {
  NonFiniteInput,
  InvalidDomain,
  ProjectionOutOfReach,
  NotOnBoundary,
  NonUnitVector,
  InvalidPath,
  TimeOutOfRange,
  WindowOutOfRange,
  BadTheta,
  LevelTooDeep,
  StartOutsideClosure,
  NonConvergent,
  DomainMismatch,
  InvalidCoefficients,
  ConfigError,
  PathFailureBudgetExceeded,
  DegenerateFit,
  ParseError,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace reflectsde
