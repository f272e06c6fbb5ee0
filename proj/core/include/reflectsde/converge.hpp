#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "reflectsde/coefficients.hpp"
#include "reflectsde/domain.hpp"
#include "reflectsde/schemes.hpp"

namespace reflectsde {

enum class StudyScheme { EulerPeano, WongZakai, SyntheticInjection };

std::string_view to_string(StudyScheme s) noexcept;
StudyScheme study_scheme_from_string(std::string_view name);

/// One Monte Carlo strong-error experiment. Every path m draws its Brownian
/// skeleton once at ref_level (path id m) and every coarser level is the
/// restriction of that skeleton, so all levels are coupled.
struct StudyConfig {
  DomainSpec domain;
  CoefficientSet coef;
  StudyScheme scheme = StudyScheme::EulerPeano;
  int p = 1;
  std::vector<int> levels;
  int paths = 1000;
  std::uint64_t seed = 0;
  double horizon = 1.0;
  Vec x0;
  /// Projection substeps of the scheme under study; 0 picks the scheme
  /// default (1 for Euler-Peano, 16 for Wong-Zakai).
  int substeps = 0;
  /// ref_level = max(levels) + ref_offset.
  int ref_offset = 2;
  int max_level = 20;
  /// Worker threads; affects wall time only.
  int threads = 1;
  double max_failure_rate = 0.01;

  int ref_level() const;
  int effective_substeps() const;
};

void validate(const StudyConfig& cfg);

/// Deterministic JSON echo of everything that influences results (threads
/// are deliberately absent).
nlohmann::json echo(const StudyConfig& cfg);

enum class RateStatus { Fitted, ExactScheme, TooFewLevels };

struct LevelError {
  int level = 0;
  std::size_t n = 0;
  double delta = 0.0;
  double error = 0.0;   // (mean max_k |X^N - X^ref|^{2p})^{1/(2p)}
  double std_error = 0.0;  // delta-method standard error of `error`
};

struct ConvergenceReport {
  std::vector<LevelError> rows;
  std::optional<double> fitted_rate;
  RateStatus rate_status = RateStatus::Fitted;
  int p = 1;
  int ref_level = 0;
  int paths = 0;
  int failed_paths = 0;
  nlohmann::json config_echo;
};

/// Strong error of the chosen scheme against a fine Euler-Peano reference
/// at ref_level. The reference uses the Stratonovich-corrected drift for the
/// Wong-Zakai study and the Ito drift b otherwise. Errors are maxima over
/// the coarse grid times. Per-path failures are counted; more than
/// max_failure_rate of them throws PathFailureBudgetExceeded.
ConvergenceReport strong_error_study(const StudyConfig& cfg);

/// Least-squares slope of log(error) against log(delta). Throws
/// DegenerateFit for fewer than three points or a non-positive error.
double fit_rate(std::span<const double> deltas, std::span<const double> errors);
double fit_rate(std::span<const int> levels, std::span<const double> errors);

struct DriftLevel {
  int level = 0;
  std::size_t n = 0;
  double delta = 0.0;
  LevelError vs_stratonovich;
  LevelError vs_ito;
};

struct DriftReport {
  std::vector<DriftLevel> rows;
  int p = 1;
  int ref_level = 0;
  int paths = 0;
  int failed_paths = 0;
  /// Largest |1/2 tr(D sigma) sigma| over the coefficient probes.
  double correction_magnitude = 0.0;
  nlohmann::json config_echo;
};

/// Wong-Zakai at each level against two coupled Euler-Peano references at
/// ref_level: one with the corrected drift b~, one with b.
DriftReport drift_correction_study(const StudyConfig& cfg);

nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const DriftReport& report);

/// `level,N,delta,error,stderr` rows and a `fitted_rate=` footer.
void write_csv(std::ostream& out, const ConvergenceReport& report);
/// `level,N,delta,err_vs_stratonovich,stderr_stratonovich,err_vs_ito,stderr_ito`.
void write_csv(std::ostream& out, const DriftReport& report);

}  // namespace reflectsde
