#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "reflectsde/linalg.hpp"

namespace reflectsde {

/// Time-stamped polyline in R^m. Knot times are strictly increasing and start
/// at 0; between knots the path is the affine interpolant.
class PiecewiseLinearPath {
 public:
  /// `values` holds one row of `dim` coordinates per knot.
  PiecewiseLinearPath(std::vector<double> times, std::vector<double> values, int dim);

  static PiecewiseLinearPath from_points(std::vector<double> times, const std::vector<Vec>& points);
  /// Constant path with a single knot at t = 0.
  static PiecewiseLinearPath constant(const Vec& point);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return times_.size(); }
  double horizon() const noexcept { return times_.back(); }

  double time(std::size_t i) const { return times_[i]; }
  Vec value(std::size_t i) const;
  double coord(std::size_t i, int c) const {
    return values_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(c)];
  }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> raw_values() const noexcept { return values_; }

  /// Affine interpolation; exact at knots. Throws TimeOutOfRange.
  Vec eval(double t) const;

  /// x + w(t) for every knot.
  PiecewiseLinearPath translated(const Vec& offset) const;

  /// Knots 0, stride, 2*stride, ...; (size - 1) must be divisible by stride.
  PiecewiseLinearPath every_nth(std::size_t stride) const;

  bool operator==(const PiecewiseLinearPath& other) const = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  int dim_ = 0;
};

/// Oscillation max_{s<=u<=v<=t} |w(u) - w(v)|, exact for polylines.
double sup_osc(const PiecewiseLinearPath& path, double s, double t);

/// Total variation over [s, t], exact for polylines.
double total_variation(const PiecewiseLinearPath& path, double s, double t);

/// Running total variation ||w||_{[0, t_i]} at every knot.
std::vector<double> cumulative_variation(const PiecewiseLinearPath& path);

/// max |w(v) - w(u)| / |v - u|^theta over knot pairs in [s, t] (with s and t
/// added). A lower bound of the Hoelder seminorm for theta < 1.
double holder_quotient(const PiecewiseLinearPath& path, double s, double t, double theta);

/// Max over the union of both knot sets in [0, t] of |a(u) - b(u)|; exact
/// because the difference of two polylines is a polyline on that union.
double sup_distance(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b, double t);

/// CSV with header `t,x1,...,xm`, 17 significant digits.
void write_csv(std::ostream& out, const PiecewiseLinearPath& path);
PiecewiseLinearPath read_path_csv(std::istream& in);

}  // namespace reflectsde
