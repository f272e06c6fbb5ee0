#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reflectsde/coefficients.hpp"
#include "reflectsde/domain.hpp"
#include "reflectsde/error.hpp"

namespace reflectsde::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kNumericalFailure = 2,
  kCounterexample = 3,
};

int exit_code_for(Errc code) noexcept;

enum class Command { Skorohod, Simulate, Converge, DriftCheck, CheckBounds };

/// Everything an INI config can say. Fields a command does not use keep
/// their defaults.
struct RunConfig {
  Command command = Command::Simulate;
  std::uint64_t seed = 0;
  double horizon = 1.0;
  std::string out;

  DomainSpec domain = DomainSpec::whole_space(1);
  CoefficientSet coef;

  // [scheme]
  std::string scheme = "euler_peano";
  int level = 6;
  std::vector<int> levels;
  int substeps = 0;
  int p = 1;
  int paths = 1000;
  Vec x0;
  int ref_offset = 2;
  int max_level = 20;
  double max_failure_rate = 0.01;
  std::uint64_t path_id = 0;

  // [skorohod]
  std::filesystem::path driver;
  bool refine = false;

  // [bounds]
  int cases = 100;
  Vec start;
};

/// Parses an INI file. Unknown sections or keys, malformed numbers and
/// out-of-range values throw ConfigError naming `section.key`. Relative
/// file paths resolve against the config's directory.
RunConfig parse_config(const std::filesystem::path& file);
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);

/// Full front end: `--config <path> [--threads k] [--out prefix]`.
/// REFLECTSDE_SEED, when set, replaces the configured seed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes a parsed config and writes `<prefix>.csv` (and `.json` for the
/// report commands).
int execute(const RunConfig& cfg, int threads, const std::string& prefix, std::ostream& out);

}  // namespace reflectsde::cli
