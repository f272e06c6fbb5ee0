#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "reflectsde/brownian.hpp"
#include "reflectsde/coefficients.hpp"
#include "reflectsde/domain.hpp"
#include "reflectsde/path.hpp"
#include "reflectsde/skorohod.hpp"

namespace reflectsde {

enum class SchemeKind { EulerPeano, WongZakai, ReflectedOde };

std::string_view to_string(SchemeKind kind) noexcept;

/// Which knots a run keeps: every projection substep, or only the driver's
/// own knots (the time grid t_k).
enum class KnotRecording { Substeps, Grid };

/// Output of a time-stepping scheme. `x` is the reflected state, `phi` the
/// accumulated projection corrections, so x - phi is the unreflected
/// drift-plus-diffusion path. `driver` is the noise polyline on the grid.
struct SchemeRun {
  PiecewiseLinearPath x;
  PiecewiseLinearPath phi;
  PiecewiseLinearPath driver;
  std::size_t grid_n = 0;
  int substeps = 1;
  KnotRecording recording = KnotRecording::Substeps;
  SchemeKind scheme = SchemeKind::EulerPeano;
  int level = -1;
  std::uint64_t seed = 0;

  /// Knot index of grid time t_k in x and phi.
  std::size_t grid_index(std::size_t k) const {
    return recording == KnotRecording::Grid ? k : k * static_cast<std::size_t>(substeps);
  }
  Vec at_grid(std::size_t k) const { return x.value(grid_index(k)); }
};

/// Euler-Peano: on each grid step the coefficients are frozen at the left
/// endpoint, the increment sigma(X) dB + b(X) dt is laid along a straight
/// line and reflected by catch-up projection in `substeps` pieces.
SchemeRun euler_peano(const DomainSpec& domain, const CoefficientSet& coef, const PiecewiseLinearPath& driver,
                      const Vec& x0, int substeps = 1, KnotRecording recording = KnotRecording::Substeps);
SchemeRun euler_peano(const DomainSpec& domain, const CoefficientSet& coef, const BrownianGenerator& gen, int level,
                      const Vec& x0, int substeps = 1, std::uint64_t path_id = 0);

/// Reflected ODE dx = sigma(x) dw + b(x) dt driven by a polyline w: each
/// driver segment is split into `substeps` Euler pieces, each followed by a
/// projection onto the closure of the domain.
SchemeRun solve_reflected_ode(const DomainSpec& domain, const CoefficientSet& coef, const PiecewiseLinearPath& driver,
                              const Vec& x0, int substeps, KnotRecording recording = KnotRecording::Substeps);

/// solve_reflected_ode with substeps doubled until the state at the driver
/// knots moves by at most rel_tolerance * (1 + sup|x|); NonConvergent otherwise.
SchemeRun solve_reflected_ode_refined(const DomainSpec& domain, const CoefficientSet& coef,
                                      const PiecewiseLinearPath& driver, const Vec& x0, int substeps,
                                      RefinementBudget budget = {});

/// Wong-Zakai: the reflected ODE driven by the piecewise-linear Brownian
/// interpolant B^N, N = 2^level.
SchemeRun wong_zakai(const DomainSpec& domain, const CoefficientSet& coef, const BrownianGenerator& gen, int level,
                     const Vec& x0, int substeps = 16, std::uint64_t path_id = 0);

inline constexpr int kDefaultWongZakaiSubsteps = 16;

/// Solution CSV schema preceded by `# scheme=<name>,level=<k>,seed=<s>`.
void write_csv(std::ostream& out, const DomainSpec& domain, const SchemeRun& run);

}  // namespace reflectsde
