#pragma once

#include <cstdint>

#include "reflectsde/path.hpp"

namespace reflectsde {

inline constexpr int kMaxBrownianLevel = 30;

/// Deterministic n-dimensional Brownian motion on [0, T] sampled on dyadic
/// grids by Levy midpoint refinement.
///
/// The Gaussian attached to each dyadic node is drawn from a counter-based
/// stream keyed by (seed, path_id, node, coordinate), so a path at level k
/// is a pure function of (seed, dim, horizon, path_id, k) and the level-k
/// knots coincide bit-for-bit with every other level-k' >= k sample of the
/// same path restricted to the coarse grid.
struct BrownianGenerator {
  std::uint64_t seed = 0;
  int dim = 1;
  double horizon = 1.0;
  int max_level = 20;
};

void validate(const BrownianGenerator& gen);

/// Knots at t_i = i T / 2^level, i = 0..2^level, starting at 0.
PiecewiseLinearPath sample_brownian(const BrownianGenerator& gen, int level, std::uint64_t path_id = 0);

/// Restricts a level-`fine_level` dyadic path to the level-`level` grid.
PiecewiseLinearPath restrict_to_level(const PiecewiseLinearPath& fine, int fine_level, int level);

}  // namespace reflectsde
