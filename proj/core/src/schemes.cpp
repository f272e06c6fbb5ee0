#include "reflectsde/schemes.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "reflectsde/error.hpp"

namespace reflectsde {

namespace {

void append(std::vector<double>& out, const Vec& v) { out.insert(out.end(), v.data(), v.data() + v.size()); }

void check_inputs(const DomainSpec& domain, const CoefficientSet& coef, const PiecewiseLinearPath& driver,
                  const Vec& x0, int substeps) {
  if (coef.state_dim != domain.dim()) throw Error(Errc::DomainMismatch, "coefficient state_dim != domain dim");
  if (coef.noise_dim != driver.dim()) throw Error(Errc::DomainMismatch, "coefficient noise_dim != driver dim");
  if (x0.size() != domain.dim()) throw Error(Errc::DomainMismatch, "x0 dimension != domain dim");
  if (substeps < 1) throw Error(Errc::ConfigError, "substeps must be >= 1");
  if (domain.classify(x0) == Membership::Exterior) {
    throw Error(Errc::StartOutsideClosure, "x0 lies outside the closure of the domain");
  }
}

// Shared stepping loop. `segment(x, k)` returns the increment sigma dB + b dt
// over the whole grid step k, evaluated with coefficients frozen at x, and is
// used when `freeze` is set (Euler-Peano). Otherwise `piece(x, dw, dt)`
// gives the increment of one substep (reflected ODE).
template <typename Segment, typename Piece>
SchemeRun integrate(const DomainSpec& domain, const PiecewiseLinearPath& driver, const Vec& x0, int substeps,
                    KnotRecording recording, bool freeze, Segment&& segment, Piece&& piece) {
  const int dim = domain.dim();
  const double reach = domain.r0() / 2.0;
  const std::size_t steps = driver.size() - 1;
  const std::size_t knots = recording == KnotRecording::Grid ? steps + 1 : steps * static_cast<std::size_t>(substeps) + 1;

  std::vector<double> times;
  std::vector<double> xs;
  std::vector<double> phis;
  times.reserve(knots);
  xs.reserve(knots * static_cast<std::size_t>(dim));
  phis.reserve(knots * static_cast<std::size_t>(dim));

  Vec x = x0;
  Vec phi = Vec::Zero(dim);
  auto record = [&](double t) {
    times.push_back(t);
    append(xs, x);
    append(phis, phi);
  };
  auto advance = [&](const Vec& inc) {
    if (inc.norm() >= reach) {
      throw Error(Errc::ProjectionOutOfReach, "substep displacement exceeds r0 / 2; raise substeps");
    }
    const Vec y = x + inc;
    const Vec correction = domain.projection_correction(y);
    x = y + correction;
    phi += correction;
  };

  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = driver.time(k);
    const double t1 = driver.time(k + 1);
    if (freeze) {
      const Vec total = segment(x, k);
      Vec prev = Vec::Zero(dim);
      for (int j = 1; j <= substeps; ++j) {
        const double frac = static_cast<double>(j) / substeps;
        const Vec next = (j == substeps) ? total : Vec(frac * total);
        advance(next - prev);
        prev = next;
        if (recording == KnotRecording::Substeps) record(j == substeps ? t1 : t0 + frac * (t1 - t0));
      }
    } else {
      const Vec w0 = driver.value(k);
      const Vec w1 = driver.value(k + 1);
      Vec w_prev = w0;
      double t_prev = t0;
      for (int j = 1; j <= substeps; ++j) {
        const double frac = static_cast<double>(j) / substeps;
        const Vec w_next = (j == substeps) ? w1 : Vec(w0 + frac * (w1 - w0));
        const double t_next = (j == substeps) ? t1 : t0 + frac * (t1 - t0);
        advance(piece(x, Vec(w_next - w_prev), t_next - t_prev));
        w_prev = w_next;
        t_prev = t_next;
        if (recording == KnotRecording::Substeps) record(t_next);
      }
    }
    if (recording == KnotRecording::Grid) record(t1);
  }

  SchemeRun run{
      PiecewiseLinearPath(times, std::move(xs), dim),
      PiecewiseLinearPath(std::move(times), std::move(phis), dim),
      driver,
  };
  run.grid_n = steps;
  run.substeps = substeps;
  run.recording = recording;
  return run;
}

}  // namespace

std::string_view to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::EulerPeano: return "euler_peano";
    case SchemeKind::WongZakai: return "wong_zakai";
    case SchemeKind::ReflectedOde: return "reflected_ode";
  }
  return "unknown";
}

SchemeRun euler_peano(const DomainSpec& domain, const CoefficientSet& coef, const PiecewiseLinearPath& driver,
                      const Vec& x0, int substeps, KnotRecording recording) {
  check_inputs(domain, coef, driver, x0, substeps);
  auto segment = [&](const Vec& x, std::size_t k) -> Vec {
    const Vec db = driver.value(k + 1) - driver.value(k);
    const double dt = driver.time(k + 1) - driver.time(k);
    return coef.sigma(x) * db + coef.drift(x) * dt;
  };
  auto unused = [](const Vec& x, const Vec&, double) -> Vec { return x; };
  SchemeRun run = integrate(domain, driver, x0, substeps, recording, true, segment, unused);
  run.scheme = SchemeKind::EulerPeano;
  return run;
}

SchemeRun euler_peano(const DomainSpec& domain, const CoefficientSet& coef, const BrownianGenerator& gen, int level,
                      const Vec& x0, int substeps, std::uint64_t path_id) {
  SchemeRun run = euler_peano(domain, coef, sample_brownian(gen, level, path_id), x0, substeps);
  run.level = level;
  run.seed = gen.seed;
  return run;
}

SchemeRun solve_reflected_ode(const DomainSpec& domain, const CoefficientSet& coef, const PiecewiseLinearPath& driver,
                              const Vec& x0, int substeps, KnotRecording recording) {
  check_inputs(domain, coef, driver, x0, substeps);
  auto unused = [](const Vec& x, std::size_t) -> Vec { return x; };
  auto piece = [&](const Vec& x, const Vec& dw, double dt) -> Vec {
    return coef.sigma(x) * dw + coef.drift(x) * dt;
  };
  SchemeRun run = integrate(domain, driver, x0, substeps, recording, false, unused, piece);
  run.scheme = SchemeKind::ReflectedOde;
  return run;
}

SchemeRun solve_reflected_ode_refined(const DomainSpec& domain, const CoefficientSet& coef,
                                      const PiecewiseLinearPath& driver, const Vec& x0, int substeps,
                                      RefinementBudget budget) {
  SchemeRun coarse = solve_reflected_ode(domain, coef, driver, x0, substeps, KnotRecording::Grid);
  for (int d = 0; d < budget.max_doublings; ++d) {
    substeps *= 2;
    SchemeRun fine = solve_reflected_ode(domain, coef, driver, x0, substeps, KnotRecording::Grid);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < driver.size(); ++k) {
      diff = std::max(diff, (coarse.x.value(k) - fine.x.value(k)).norm());
      scale = std::max(scale, fine.x.value(k).norm());
    }
    if (diff <= budget.rel_tolerance * (1.0 + scale)) {
      return solve_reflected_ode(domain, coef, driver, x0, substeps, KnotRecording::Substeps);
    }
    coarse = std::move(fine);
  }
  throw Error(Errc::NonConvergent, "reflected ODE still moving after " + std::to_string(budget.max_doublings) +
                                       " doublings");
}

SchemeRun wong_zakai(const DomainSpec& domain, const CoefficientSet& coef, const BrownianGenerator& gen, int level,
                     const Vec& x0, int substeps, std::uint64_t path_id) {
  SchemeRun run = solve_reflected_ode(domain, coef, sample_brownian(gen, level, path_id), x0, substeps);
  run.scheme = SchemeKind::WongZakai;
  run.level = level;
  run.seed = gen.seed;
  return run;
}

void write_csv(std::ostream& out, const DomainSpec& domain, const SchemeRun& run) {
  out << "# scheme=" << to_string(run.scheme) << ",level=" << run.level << ",seed=" << run.seed << '\n';
  std::vector<std::uint8_t> contact(run.x.size());
  for (std::size_t i = 0; i < run.x.size(); ++i) {
    contact[i] = domain.classify(run.x.value(i)) == Membership::Boundary ? 1 : 0;
  }
  SkorohodSolution view{run.x, run.phi, cumulative_variation(run.phi), std::move(contact), nullptr};
  write_csv(out, view);
}

}  // namespace reflectsde
