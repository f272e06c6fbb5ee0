#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "reflectsde/domain.hpp"
#include "reflectsde/path.hpp"

namespace reflectsde {

/// Reflected path xi = Gamma(w), local-time term phi = xi - w, running
/// variation of phi and the boundary-contact flag at every knot.
struct SkorohodSolution {
  PiecewiseLinearPath xi;
  PiecewiseLinearPath phi;
  std::vector<double> phi_variation;
  std::vector<std::uint8_t> contact;
  /// Domain the solution was computed on; null when read back from CSV.
  std::shared_ptr<const DomainSpec> domain;

  /// The driver recovered as xi - phi.
  PiecewiseLinearPath driver() const;
};

/// Catch-up projection scheme: every knot interval of w is cut into
/// `substeps` equal pieces and after each piece the state is projected back
/// onto the closure of the domain. The projection corrections accumulate
/// into phi. Output knots are the refined grid.
///
/// Throws StartOutsideClosure, and ProjectionOutOfReach on exterior-ball
/// domains when a piece moves further than r0 / 2.
SkorohodSolution solve(const DomainSpec& domain, const PiecewiseLinearPath& w, int substeps = 1);

struct RefinementBudget {
  int max_doublings = 8;
  double rel_tolerance = 1e-6;
};

/// Doubles `substeps` until xi at the driver knots moves by at most
/// rel_tolerance * (1 + sup|xi|); throws NonConvergent when the budget runs out.
SkorohodSolution solve_refined(const DomainSpec& domain, const PiecewiseLinearPath& w, int substeps,
                               RefinementBudget budget = {});

/// Reflection on [0, inf) in one dimension:
/// phi(t) = max(0, max_{s<=t} -w(s)), xi = w + phi, evaluated on the knots.
SkorohodSolution solve_halfline_1d(const PiecewiseLinearPath& w);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

inline constexpr double kXiVariationConstant = 2.0 * (1.4142135623730950488 + 1.0);

/// ||xi||_[s,t] <= 2 (sqrt 2 + 1) ||w||_[s,t].
BoundCheck check_xi_variation_bound(const SkorohodSolution& sol, const PiecewiseLinearPath& w, double s, double t);

/// Half-Hoelder stability of the Skorohod map between two solutions at time t:
///   |xi(t) - xi'(t)|^2 <= { |w(t) - w'(t)|^2 + 4 (V + V') max_{s<=t} |w(s) - w'(s)| }
///                          * exp((V + V') / r0),
/// with V, V' the variations of phi, phi' on [0, t]. The exponential is 1 on
/// convex domains (r0 = infinity).
BoundCheck check_holder_stability(const DomainSpec& domain, const SkorohodSolution& a, const SkorohodSolution& b,
                                  double t);

struct Diagnostics {
  double phi_variation = 0.0;  // ||phi||_[s,t]
  double w_oscillation = 0.0;  // ||w||_{inf,[s,t]}
  double w_holder = 0.0;       // knot-pair Hoelder quotient of w
};

Diagnostics diagnostics(const SkorohodSolution& sol, const PiecewiseLinearPath& w, double s, double t, double theta);

/// Result of checking the discrete Skorohod conditions on a solution.
struct InvariantReport {
  bool decomposition = true;
  bool containment = true;
  bool support = true;
  bool direction = true;
  bool variation = true;
  std::string first_failure;

  bool ok() const { return decomposition && containment && support && direction && variation; }
};

inline constexpr double kSupportTolerance = 1e-12;
inline constexpr double kDirectionTolerance = 1e-6;

InvariantReport check_invariants(const DomainSpec& domain, const PiecewiseLinearPath& w, const SkorohodSolution& sol);

/// CSV `t,xi_1..xi_d,phi_1..phi_d,phi_var,contact`.
void write_csv(std::ostream& out, const SkorohodSolution& sol);
SkorohodSolution read_solution_csv(std::istream& in);

}  // namespace reflectsde
