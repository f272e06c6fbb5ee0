#include "reflectsde/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "reflectsde/brownian.hpp"
#include "reflectsde/converge.hpp"
#include "reflectsde/csv.hpp"
#include "reflectsde/schemes.hpp"
#include "reflectsde/skorohod.hpp"

namespace reflectsde::cli {

namespace {

std::ofstream open_output(const std::string& file) {
  const std::filesystem::path p(file);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "out: cannot write " + file);
  out.precision(17);
  return out;
}

template <typename Writer>
void write_file(const std::string& file, Writer&& writer) {
  std::ofstream out = open_output(file);
  writer(out);
  if (!out) throw Error(Errc::ConfigError, "out: write to " + file + " failed");
}

StudyConfig study_config(const RunConfig& cfg, int threads) {
  return StudyConfig{
      .domain = cfg.domain,
      .coef = cfg.coef,
      .scheme = study_scheme_from_string(cfg.scheme),
      .p = cfg.p,
      .levels = cfg.levels,
      .paths = cfg.paths,
      .seed = cfg.seed,
      .horizon = cfg.horizon,
      .x0 = cfg.x0,
      .substeps = cfg.substeps,
      .ref_offset = cfg.ref_offset,
      .max_level = cfg.max_level,
      .threads = threads,
      .max_failure_rate = cfg.max_failure_rate,
  };
}

int run_skorohod(const RunConfig& cfg, const std::string& prefix, std::ostream& out) {
  std::ifstream in(cfg.driver);
  if (!in) throw Error(Errc::ConfigError, "skorohod.driver: cannot open " + cfg.driver.string());
  const PiecewiseLinearPath w = read_path_csv(in);
  const int substeps = std::max(1, cfg.substeps);
  const SkorohodSolution sol = cfg.refine ? solve_refined(cfg.domain, w, substeps) : solve(cfg.domain, w, substeps);
  write_file(prefix + ".csv", [&](std::ostream& os) { write_csv(os, sol); });

  const InvariantReport rep = check_invariants(cfg.domain, w, sol);
  fmt::print(out, "skorohod: {} knots, |phi| = {}, invariants {}\n", sol.xi.size(),
             csv::format_double(sol.phi_variation.back()), rep.ok() ? "ok" : "FAILED (" + rep.first_failure + ")");
  fmt::print(out, "wrote {}.csv\n", prefix);
  return rep.ok() ? kSuccess : kNumericalFailure;
}

int run_simulate(const RunConfig& cfg, const std::string& prefix, std::ostream& out) {
  const BrownianGenerator gen{cfg.seed, cfg.coef.noise_dim, cfg.horizon, cfg.max_level};
  validate(gen);
  validate(cfg.coef);
  SchemeRun run = cfg.scheme == "wong_zakai"
                      ? wong_zakai(cfg.domain, cfg.coef, gen, cfg.level, cfg.x0,
                                   cfg.substeps > 0 ? cfg.substeps : kDefaultWongZakaiSubsteps, cfg.path_id)
                      : euler_peano(cfg.domain, cfg.coef, gen, cfg.level, cfg.x0, std::max(1, cfg.substeps),
                                    cfg.path_id);
  write_file(prefix + ".csv", [&](std::ostream& os) { write_csv(os, cfg.domain, run); });
  const Vec xt = run.x.value(run.x.size() - 1);
  std::string terminal;
  for (Eigen::Index i = 0; i < xt.size(); ++i) terminal += (i ? " " : "") + csv::format_double(xt(i));
  fmt::print(out, "{}: N = {}, substeps = {}, X(T) = [{}]\n", to_string(run.scheme), run.grid_n, run.substeps,
             terminal);
  fmt::print(out, "wrote {}.csv\n", prefix);
  return kSuccess;
}

int run_converge(const RunConfig& cfg, int threads, const std::string& prefix, std::ostream& out) {
  const ConvergenceReport report = strong_error_study(study_config(cfg, threads));
  write_file(prefix + ".json", [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
  write_file(prefix + ".csv", [&](std::ostream& os) { write_csv(os, report); });

  fmt::print(out, "{:>5} {:>8} {:>12} {:>12} {:>12}\n", "level", "N", "delta", "error", "stderr");
  for (const auto& r : report.rows) {
    fmt::print(out, "{:>5} {:>8} {:>12.4e} {:>12.4e} {:>12.4e}\n", r.level, r.n, r.delta, r.error, r.std_error);
  }
  switch (report.rate_status) {
    case RateStatus::Fitted: fmt::print(out, "fitted_rate = {:.6f}\n", *report.fitted_rate); break;
    case RateStatus::ExactScheme: fmt::print(out, "fitted_rate = exact (zero error at every level)\n"); break;
    case RateStatus::TooFewLevels: fmt::print(out, "fitted_rate = none (fewer than three levels)\n"); break;
  }
  if (report.failed_paths > 0) fmt::print(out, "failed paths: {} of {}\n", report.failed_paths, report.paths);
  fmt::print(out, "wrote {0}.json and {0}.csv\n", prefix);
  return kSuccess;
}

int run_drift_check(const RunConfig& cfg, int threads, const std::string& prefix, std::ostream& out) {
  const DriftReport report = drift_correction_study(study_config(cfg, threads));
  write_file(prefix + ".json", [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
  write_file(prefix + ".csv", [&](std::ostream& os) { write_csv(os, report); });

  fmt::print(out, "{:>5} {:>14} {:>12} {:>14} {:>12}\n", "level", "err_vs_strat", "stderr", "err_vs_ito", "stderr");
  for (const auto& r : report.rows) {
    fmt::print(out, "{:>5} {:>14.4e} {:>12.4e} {:>14.4e} {:>12.4e}\n", r.level, r.vs_stratonovich.error,
               r.vs_stratonovich.std_error, r.vs_ito.error, r.vs_ito.std_error);
  }
  fmt::print(out, "max |b~ - b| over probes = {:.4e}\n", report.correction_magnitude);
  fmt::print(out, "wrote {0}.json and {0}.csv\n", prefix);
  return kSuccess;
}

// Sweeps the variation bound and the Hoelder stability inequality over
// Brownian drivers: case i reflects start + B^N and start + B^{2N}, both
// taken from path i of the generator.
int run_check_bounds(const RunConfig& cfg, const std::string& prefix, std::ostream& out) {
  const int dim = cfg.domain.dim();
  const BrownianGenerator gen{cfg.seed, dim, cfg.horizon, std::max(cfg.max_level, cfg.level + 1)};
  validate(gen);
  const int substeps = std::max(1, cfg.substeps);

  int xi_violations = 0;
  int holder_violations = 0;
  nlohmann::json counterexamples = nlohmann::json::array();
  std::ofstream table = open_output(prefix + ".csv");
  table << "case,xi_var_lhs,xi_var_rhs,xi_ok,holder_worst_lhs,holder_worst_rhs,holder_ok\n";

  for (int i = 0; i < cfg.cases; ++i) {
    const auto id = static_cast<std::uint64_t>(i);
    const PiecewiseLinearPath w = sample_brownian(gen, cfg.level, id).translated(cfg.start);
    const PiecewiseLinearPath w2 = sample_brownian(gen, cfg.level + 1, id).translated(cfg.start);
    const SkorohodSolution a = solve(cfg.domain, w, substeps);
    const SkorohodSolution b = solve(cfg.domain, w2, substeps);

    const BoundCheck xi = check_xi_variation_bound(a, w, 0.0, w.horizon());
    // First violation if any, otherwise the knot with the largest lhs / rhs.
    BoundCheck worst{0.0, 0.0, true};
    double worst_ratio = -1.0;
    for (std::size_t k = 1; k < w.size(); ++k) {
      const BoundCheck h = check_holder_stability(cfg.domain, a, b, w.time(k));
      if (!h.ok) {
        worst = h;
        break;
      }
      const double ratio = h.rhs > 0.0 ? h.lhs / h.rhs : 0.0;
      if (ratio > worst_ratio) {
        worst = h;
        worst_ratio = ratio;
      }
    }
    table << i << ',' << csv::format_double(xi.lhs) << ',' << csv::format_double(xi.rhs) << ',' << xi.ok << ','
          << csv::format_double(worst.lhs) << ',' << csv::format_double(worst.rhs) << ',' << worst.ok << '\n';

    if (!xi.ok || !worst.ok) {
      xi_violations += xi.ok ? 0 : 1;
      holder_violations += worst.ok ? 0 : 1;
      const std::string stem = fmt::format("{}.counterexample_{}", prefix, i);
      write_file(stem + "_driver.csv", [&](std::ostream& os) { write_csv(os, w); });
      write_file(stem + "_driver_fine.csv", [&](std::ostream& os) { write_csv(os, w2); });
      write_file(stem + "_solution.csv", [&](std::ostream& os) { write_csv(os, a); });
      counterexamples.push_back({{"case", i}, {"xi_variation_ok", xi.ok}, {"holder_ok", worst.ok}, {"files", stem}});
    }
  }
  if (!table) throw Error(Errc::ConfigError, "out: write to " + prefix + ".csv failed");

  const bool passed = xi_violations == 0 && holder_violations == 0;
  nlohmann::json summary{{"cases", cfg.cases},
                         {"level", cfg.level},
                         {"substeps", substeps},
                         {"xi_variation_violations", xi_violations},
                         {"holder_violations", holder_violations},
                         {"passed", passed},
                         {"counterexamples", counterexamples}};
  write_file(prefix + ".json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  fmt::print(out, "check-bounds: {} cases, {} variation violations, {} Hoelder violations: {}\n", cfg.cases,
             xi_violations, holder_violations, passed ? "PASS" : "FAIL");
  fmt::print(out, "wrote {0}.json and {0}.csv\n", prefix);
  return passed ? kSuccess : kCounterexample;
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::NonConvergent:
    case Errc::PathFailureBudgetExceeded:
    case Errc::ProjectionOutOfReach:
    case Errc::DegenerateFit:
    case Errc::NonFiniteInput:
      return kNumericalFailure;
    default:
      return kValidationError;
  }
}

int execute(const RunConfig& cfg, int threads, const std::string& prefix, std::ostream& out) {
  switch (cfg.command) {
    case Command::Skorohod: return run_skorohod(cfg, prefix, out);
    case Command::Simulate: return run_simulate(cfg, prefix, out);
    case Command::Converge: return run_converge(cfg, threads, prefix, out);
    case Command::DriftCheck: return run_drift_check(cfg, threads, prefix, out);
    case Command::CheckBounds: return run_check_bounds(cfg, prefix, out);
  }
  return kValidationError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reflected SDE simulation and convergence studies"};
  app.name("reflectsde");
  std::string config_path;
  int threads = 1;
  std::string prefix;
  app.add_option("--config", config_path, "INI experiment configuration")->required();
  app.add_option("--threads", threads, "worker threads (wall time only)")->check(CLI::Range(1, 1024));
  app.add_option("--out", prefix, "output path prefix (overrides run.out)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    RunConfig cfg = parse_config(config_path);
    if (const char* env = std::getenv("REFLECTSDE_SEED"); env && *env) {
      const std::string_view s(env);
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(Errc::ConfigError, "REFLECTSDE_SEED: expected an unsigned integer, got '" + std::string(s) + "'");
      }
      cfg.seed = seed;
    }
    if (prefix.empty()) prefix = cfg.out.empty() ? "reflectsde_out" : cfg.out;
    return execute(cfg, threads, prefix, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

}  // namespace reflectsde::cli
