#include "reflectsde/brownian.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "reflectsde/error.hpp"
#include "reflectsde/philox.hpp"

namespace reflectsde {

namespace {

// Node 0 is the terminal value B(T); the midpoint with odd index j on the
// level-l grid (l >= 1) is node 2^(l-1) + (j-1)/2.
double node_normal(const BrownianGenerator& gen, std::uint64_t path_id, std::uint32_t node, int coord) {
  const philox::Counter ctr{node, static_cast<std::uint32_t>(coord), static_cast<std::uint32_t>(path_id),
                            static_cast<std::uint32_t>(path_id >> 32)};
  const philox::Key key{static_cast<std::uint32_t>(gen.seed), static_cast<std::uint32_t>(gen.seed >> 32)};
  return philox::standard_normal(ctr, key);
}

}  // namespace

void validate(const BrownianGenerator& gen) {
  if (gen.dim < 1 || gen.dim > kMaxDim) throw Error(Errc::ConfigError, "brownian dim out of range");
  if (!(gen.horizon > 0.0) || !std::isfinite(gen.horizon)) throw Error(Errc::ConfigError, "horizon must be positive");
  if (gen.max_level < 0 || gen.max_level > kMaxBrownianLevel) {
    throw Error(Errc::ConfigError, "max_level must be in [0, " + std::to_string(kMaxBrownianLevel) + "]");
  }
}

PiecewiseLinearPath sample_brownian(const BrownianGenerator& gen, int level, std::uint64_t path_id) {
  validate(gen);
  if (level < 0 || level > gen.max_level) {
    throw Error(Errc::LevelTooDeep, "level " + std::to_string(level) + " exceeds max_level " +
                                        std::to_string(gen.max_level));
  }
  const std::size_t n = std::size_t{1} << level;
  const auto dim = static_cast<std::size_t>(gen.dim);
  std::vector<double> values((n + 1) * dim, 0.0);
  const double sqrt_t = std::sqrt(gen.horizon);
  for (std::size_t c = 0; c < dim; ++c) {
    values[n * dim + c] = sqrt_t * node_normal(gen, path_id, 0, static_cast<int>(c));
  }
  for (int l = 1; l <= level; ++l) {
    const std::size_t stride = std::size_t{1} << (level - l);
    // Conditional std-dev of a bridge midpoint over an interval of T / 2^(l-1).
    const double sd = std::sqrt(std::ldexp(gen.horizon, -(l + 1)));
    const std::size_t count = std::size_t{1} << l;
    for (std::size_t j = 1; j < count; j += 2) {
      const std::size_t pos = j * stride;
      const auto node = static_cast<std::uint32_t>((std::size_t{1} << (l - 1)) + (j - 1) / 2);
      for (std::size_t c = 0; c < dim; ++c) {
        const double mid = 0.5 * (values[(pos - stride) * dim + c] + values[(pos + stride) * dim + c]);
        values[pos * dim + c] = mid + sd * node_normal(gen, path_id, node, static_cast<int>(c));
      }
    }
  }
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = std::ldexp(gen.horizon * static_cast<double>(i), -level);
  return PiecewiseLinearPath(std::move(times), std::move(values), gen.dim);
}

PiecewiseLinearPath restrict_to_level(const PiecewiseLinearPath& fine, int fine_level, int level) {
  if (level < 0 || level > fine_level) throw Error(Errc::LevelTooDeep, "cannot restrict to a finer level");
  if (fine.size() != (std::size_t{1} << fine_level) + 1) {
    throw Error(Errc::InvalidPath, "path is not on the level-" + std::to_string(fine_level) + " grid");
  }
  return fine.every_nth(std::size_t{1} << (fine_level - level));
}

}  // namespace reflectsde
