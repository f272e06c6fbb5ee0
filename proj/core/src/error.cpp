#include "reflectsde/error.hpp"

namespace reflectsde {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::InvalidDomain: return "InvalidDomain";
    case Errc::ProjectionOutOfReach: return "ProjectionOutOfReach";
    case Errc::NotOnBoundary: return "NotOnBoundary";
    case Errc::NonUnitVector: return "NonUnitVector";
    case Errc::InvalidPath: return "InvalidPath";
    case Errc::TimeOutOfRange: return "TimeOutOfRange";
    case Errc::WindowOutOfRange: return "WindowOutOfRange";
    case Errc::BadTheta: return "BadTheta";
    case Errc::LevelTooDeep: return "LevelTooDeep";
    case Errc::StartOutsideClosure: return "StartOutsideClosure";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::InvalidCoefficients: return "InvalidCoefficients";
    case Errc::ConfigError: return "ConfigError";
    case Errc::PathFailureBudgetExceeded: return "PathFailureBudgetExceeded";
    case Errc::DegenerateFit: return "DegenerateFit";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace reflectsde
