#include "reflectsde/converge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include "reflectsde/brownian.hpp"
#include "reflectsde/csv.hpp"
#include "reflectsde/error.hpp"

namespace reflectsde {

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

nlohmann::json domain_json(const DomainSpec& d) {
  nlohmann::json out;
  out["kind"] = std::string(to_string(d.kind()));
  out["dim"] = d.dim();
  out["eps_bd"] = d.eps_bd();
  switch (d.kind()) {
    case DomainKind::WholeSpace:
      break;
    case DomainKind::Ball:
    case DomainKind::BallExterior:
      out["center"] = vec_json(d.center());
      out["radius"] = d.radius();
      break;
    case DomainKind::HalfSpace:
    case DomainKind::ConvexPolyhedron: {
      nlohmann::json faces = nlohmann::json::array();
      for (const auto& f : d.faces()) faces.push_back({{"normal", vec_json(f.normal)}, {"offset", f.offset}});
      out["faces"] = std::move(faces);
      break;
    }
  }
  return out;
}

constexpr double kRoundingFloor = 1e-12;

struct PathResult {
  bool ok = false;
  // errors[r][l]: max grid error of level l against reference r.
  std::vector<std::vector<double>> errors;
};

// Runs every path (in parallel when asked) against each reference
// coefficient set and reduces the 2p-th moments in path-id order.
struct CoupledErrors {
  std::vector<std::vector<LevelError>> per_ref;
  int failed = 0;
};

PathResult run_path(const StudyConfig& cfg, const std::vector<CoefficientSet>& refs, std::uint64_t path_id) {
  const int ref_level = cfg.ref_level();
  const BrownianGenerator gen{cfg.seed, cfg.coef.noise_dim, cfg.horizon, cfg.max_level};
  const PiecewiseLinearPath fine = sample_brownian(gen, ref_level, path_id);

  std::vector<SchemeRun> ref_runs;
  ref_runs.reserve(refs.size());
  for (const auto& rc : refs) {
    ref_runs.push_back(euler_peano(cfg.domain, rc, fine, cfg.x0, 1, KnotRecording::Grid));
  }

  PathResult res;
  res.errors.assign(refs.size(), std::vector<double>(cfg.levels.size(), 0.0));
  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    const int level = cfg.levels[li];
    const PiecewiseLinearPath coarse = restrict_to_level(fine, ref_level, level);
    if (!(coarse == sample_brownian(gen, level, path_id))) {
      throw std::logic_error("Brownian bridge coupling broken at level " + std::to_string(level));
    }
    const std::size_t stride = std::size_t{1} << (ref_level - level);
    const std::size_t n = coarse.size() - 1;
    const double delta = std::ldexp(cfg.horizon, -level);

    std::optional<SchemeRun> run;
    if (cfg.scheme == StudyScheme::EulerPeano) {
      run = euler_peano(cfg.domain, cfg.coef, coarse, cfg.x0, cfg.effective_substeps(), KnotRecording::Grid);
    } else if (cfg.scheme == StudyScheme::WongZakai) {
      run = solve_reflected_ode(cfg.domain, cfg.coef, coarse, cfg.x0, cfg.effective_substeps(), KnotRecording::Grid);
    }
    // Synthetic injection: the reference plus a fixed offset of length
    // sqrt(delta) along e_1.
    Vec shift = Vec::Zero(cfg.domain.dim());
    shift(0) = std::sqrt(delta);

    for (std::size_t r = 0; r < refs.size(); ++r) {
      const SchemeRun& ref = ref_runs[r];
      double worst = 0.0;
      double scale = 0.0;
      for (std::size_t k = 0; k <= n; ++k) {
        const Vec ref_k = ref.x.value(k * stride);
        const Vec x_k = run ? run->x.value(k) : Vec(ref_k + shift);
        worst = std::max(worst, (x_k - ref_k).norm());
        scale = std::max(scale, ref_k.norm());
      }
      // Coarse and fine grids sum the same increments in a different order.
      res.errors[r][li] = worst <= kRoundingFloor * (1.0 + scale) ? 0.0 : worst;
    }
  }
  res.ok = true;
  return res;
}

CoupledErrors coupled_errors(const StudyConfig& cfg, const std::vector<CoefficientSet>& refs) {
  const auto m = static_cast<std::size_t>(cfg.paths);
  std::vector<PathResult> results(m);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= m) return;
      try {
        results[i] = run_path(cfg, refs, i);
      } catch (const Error&) {
        results[i].ok = false;
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(m);
      }
    }
  };
  const int nthreads = std::max(1, std::min(cfg.threads, cfg.paths));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  CoupledErrors out;
  for (const auto& r : results) out.failed += r.ok ? 0 : 1;
  if (out.failed > static_cast<int>(std::floor(cfg.max_failure_rate * cfg.paths))) {
    throw Error(Errc::PathFailureBudgetExceeded,
                std::to_string(out.failed) + " of " + std::to_string(cfg.paths) + " paths failed");
  }

  const double q = 2.0 * cfg.p;
  out.per_ref.assign(refs.size(), {});
  for (std::size_t r = 0; r < refs.size(); ++r) {
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
      // Welford accumulation in path-id order for a reproducible sum.
      double mean = 0.0;
      double m2 = 0.0;
      std::size_t count = 0;
      for (const auto& res : results) {
        if (!res.ok) continue;
        const double v = std::pow(res.errors[r][li], q);
        ++count;
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
      }
      LevelError row;
      row.level = cfg.levels[li];
      row.n = std::size_t{1} << row.level;
      row.delta = std::ldexp(cfg.horizon, -row.level);
      row.error = std::pow(mean, 1.0 / q);
      const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
      const double se_moment = std::sqrt(var / static_cast<double>(count));
      row.std_error = mean > 0.0 ? se_moment * std::pow(mean, 1.0 / q - 1.0) / q : 0.0;
      out.per_ref[r].push_back(row);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(StudyScheme s) noexcept {
  switch (s) {
    case StudyScheme::EulerPeano: return "euler_peano";
    case StudyScheme::WongZakai: return "wong_zakai";
    case StudyScheme::SyntheticInjection: return "synthetic";
  }
  return "unknown";
}

StudyScheme study_scheme_from_string(std::string_view name) {
  if (name == "euler_peano") return StudyScheme::EulerPeano;
  if (name == "wong_zakai") return StudyScheme::WongZakai;
  if (name == "synthetic") return StudyScheme::SyntheticInjection;
  throw Error(Errc::ConfigError, "unknown scheme '" + std::string(name) + "'");
}

int StudyConfig::ref_level() const {
  return levels.empty() ? ref_offset : *std::max_element(levels.begin(), levels.end()) + ref_offset;
}

int StudyConfig::effective_substeps() const {
  if (substeps > 0) return substeps;
  return scheme == StudyScheme::WongZakai ? kDefaultWongZakaiSubsteps : 1;
}

void validate(const StudyConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(Errc::ConfigError, what); };
  if (cfg.paths < 100) fail("paths: at least 100 Monte Carlo paths are required");
  if (cfg.p != 1 && cfg.p != 2) fail("p: moment parameter must be 1 or 2");
  if (cfg.levels.empty()) fail("levels: at least one level is required");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    if (cfg.levels[i] < 0) fail("levels: must be non-negative");
    if (i > 0 && cfg.levels[i] <= cfg.levels[i - 1]) fail("levels: must be strictly increasing");
  }
  if (cfg.ref_offset < 2) fail("ref_offset: reference must be at least two levels finer");
  if (cfg.max_level > kMaxBrownianLevel) fail("max_level: too deep");
  if (cfg.ref_level() > cfg.max_level) fail("levels: reference level exceeds the generator's max_level");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) fail("horizon: must be positive");
  if (cfg.substeps < 0) fail("substeps: must be >= 0");
  if (cfg.threads < 1) fail("threads: must be >= 1");
  if (cfg.x0.size() != cfg.domain.dim()) fail("x0: dimension differs from the domain");
  if (cfg.coef.state_dim != cfg.domain.dim()) fail("coefficients: state dimension differs from the domain");
  if (!(cfg.max_failure_rate >= 0.0 && cfg.max_failure_rate < 1.0)) fail("max_failure_rate: must be in [0, 1)");
}

nlohmann::json echo(const StudyConfig& cfg) {
  nlohmann::json out;
  out["domain"] = domain_json(cfg.domain);
  out["coefficients"] = cfg.coef.name;
  out["noise_dim"] = cfg.coef.noise_dim;
  out["scheme"] = std::string(to_string(cfg.scheme));
  out["p"] = cfg.p;
  out["levels"] = cfg.levels;
  out["paths"] = cfg.paths;
  out["seed"] = cfg.seed;
  out["horizon"] = cfg.horizon;
  out["x0"] = vec_json(cfg.x0);
  out["substeps"] = cfg.effective_substeps();
  out["ref_level"] = cfg.ref_level();
  out["max_failure_rate"] = cfg.max_failure_rate;
  return out;
}

double fit_rate(std::span<const double> deltas, std::span<const double> errors) {
  if (deltas.size() != errors.size()) throw Error(Errc::DegenerateFit, "deltas and errors differ in length");
  if (deltas.size() < 3) throw Error(Errc::DegenerateFit, "need at least three levels");
  const auto n = static_cast<double>(deltas.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(errors[i] > 0.0)) throw Error(Errc::DegenerateFit, "zero error: scheme is exact at these levels");
    if (!(deltas[i] > 0.0)) throw Error(Errc::DegenerateFit, "non-positive step size");
    mx += std::log(deltas[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double dx = std::log(deltas[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error(Errc::DegenerateFit, "all step sizes are equal");
  return sxy / sxx;
}

double fit_rate(std::span<const int> levels, std::span<const double> errors) {
  std::vector<double> deltas;
  for (int k : levels) deltas.push_back(std::ldexp(1.0, -k));
  return fit_rate(deltas, errors);
}

ConvergenceReport strong_error_study(const StudyConfig& cfg) {
  validate(cfg);
  validate(cfg.coef);
  const CoefficientSet ref_coef = cfg.scheme == StudyScheme::WongZakai ? stratonovich_drift(cfg.coef) : cfg.coef;
  const CoupledErrors errs = coupled_errors(cfg, {ref_coef});

  ConvergenceReport report;
  report.rows = errs.per_ref.front();
  report.p = cfg.p;
  report.ref_level = cfg.ref_level();
  report.paths = cfg.paths;
  report.failed_paths = errs.failed;
  report.config_echo = echo(cfg);

  std::vector<double> deltas;
  std::vector<double> errors;
  for (const auto& row : report.rows) {
    deltas.push_back(row.delta);
    errors.push_back(row.error);
  }
  if (report.rows.size() < 3) {
    report.rate_status = RateStatus::TooFewLevels;
  } else if (std::any_of(errors.begin(), errors.end(), [](double e) { return !(e > 0.0); })) {
    report.rate_status = RateStatus::ExactScheme;
  } else {
    report.fitted_rate = fit_rate(deltas, errors);
  }
  return report;
}

DriftReport drift_correction_study(const StudyConfig& cfg) {
  StudyConfig wz = cfg;
  wz.scheme = StudyScheme::WongZakai;
  validate(wz);
  validate(wz.coef);
  const CoupledErrors errs = coupled_errors(wz, {stratonovich_drift(wz.coef), wz.coef});

  DriftReport report;
  report.p = wz.p;
  report.ref_level = wz.ref_level();
  report.paths = wz.paths;
  report.failed_paths = errs.failed;
  report.correction_magnitude = max_drift_correction(wz.coef);
  report.config_echo = echo(wz);
  for (std::size_t li = 0; li < wz.levels.size(); ++li) {
    const LevelError& s = errs.per_ref[0][li];
    report.rows.push_back({s.level, s.n, s.delta, s, errs.per_ref[1][li]});
  }
  return report;
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json out;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"level", r.level}, {"N", r.n}, {"delta", r.delta}, {"error", r.error}, {"stderr", r.std_error}});
  }
  out["levels"] = std::move(rows);
  switch (report.rate_status) {
    case RateStatus::Fitted: out["fitted_rate"] = *report.fitted_rate; break;
    case RateStatus::ExactScheme: out["fitted_rate"] = "exact"; break;
    case RateStatus::TooFewLevels: out["fitted_rate"] = nullptr; break;
  }
  out["p"] = report.p;
  out["ref_level"] = report.ref_level;
  out["paths"] = report.paths;
  out["failed_paths"] = report.failed_paths;
  out["config"] = report.config_echo;
  return out;
}

nlohmann::json to_json(const DriftReport& report) {
  nlohmann::json out;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"level", r.level},
                    {"N", r.n},
                    {"delta", r.delta},
                    {"err_vs_stratonovich", r.vs_stratonovich.error},
                    {"stderr_stratonovich", r.vs_stratonovich.std_error},
                    {"err_vs_ito", r.vs_ito.error},
                    {"stderr_ito", r.vs_ito.std_error}});
  }
  out["levels"] = std::move(rows);
  out["p"] = report.p;
  out["ref_level"] = report.ref_level;
  out["paths"] = report.paths;
  out["failed_paths"] = report.failed_paths;
  out["correction_magnitude"] = report.correction_magnitude;
  out["config"] = report.config_echo;
  return out;
}

void write_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "level,N,delta,error,stderr\n";
  for (const auto& r : report.rows) {
    out << r.level << ',' << r.n << ',' << csv::format_double(r.delta) << ',' << csv::format_double(r.error) << ','
        << csv::format_double(r.std_error) << '\n';
  }
  out << "fitted_rate=";
  switch (report.rate_status) {
    case RateStatus::Fitted: out << csv::format_double(*report.fitted_rate); break;
    case RateStatus::ExactScheme: out << "exact"; break;
    case RateStatus::TooFewLevels: out << "none"; break;
  }
  out << '\n';
}

void write_csv(std::ostream& out, const DriftReport& report) {
  out << "level,N,delta,err_vs_stratonovich,stderr_stratonovich,err_vs_ito,stderr_ito\n";
  for (const auto& r : report.rows) {
    out << r.level << ',' << r.n << ',' << csv::format_double(r.delta) << ','
        << csv::format_double(r.vs_stratonovich.error) << ',' << csv::format_double(r.vs_stratonovich.std_error) << ','
        << csv::format_double(r.vs_ito.error) << ',' << csv::format_double(r.vs_ito.std_error) << '\n';
  }
}

}  // namespace reflectsde
