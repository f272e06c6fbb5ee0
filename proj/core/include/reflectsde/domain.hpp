#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "reflectsde/linalg.hpp"

namespace reflectsde {

enum class DomainKind { WholeSpace, HalfSpace, Ball, BallExterior, ConvexPolyhedron };

enum class Membership { Interior, Boundary, Exterior };

std::string_view to_string(DomainKind kind) noexcept;
std::string_view to_string(Membership m) noexcept;

/// Open half-space {y : normal . y > offset}; `normal` has unit length.
struct HalfSpaceConstraint {
  Vec normal;
  double offset = 0.0;
};

/// Finite description of the inward normal set at a boundary point.
///
/// With a single generator the set is that unit vector. With several
/// generators (polyhedron edges and corners) the set is every unit vector
/// in their conic hull.
struct NormalCone {
  std::vector<Vec> generators;
  bool is_cone = false;
};

/// Uniform cone parameters (delta, beta) of the domain. Stored as metadata;
/// never verified from point queries.
struct ConeCondition {
  double delta = 1.0;
  double beta = 1.0;
};

inline constexpr double kDefaultBoundaryTolerance = 1e-10;

/// Closed-form geometric domain D in R^d together with the regularity
/// metadata the reflection theory needs: exterior sphere radius r0, cone
/// parameters (delta, beta) and, for convex kinds, the constant gamma of the
/// curvature inequality with f identically zero.
///
/// Immutable after construction; every query is a pure function.
class DomainSpec {
 public:
  static DomainSpec whole_space(int dim);
  static DomainSpec half_space(const Vec& normal, double offset);
  static DomainSpec ball(const Vec& center, double radius);
  static DomainSpec ball_exterior(const Vec& center, double radius);
  /// Intersection of open half-spaces. Throws InvalidDomain if the interior
  /// is empty.
  static DomainSpec convex_polyhedron(std::vector<HalfSpaceConstraint> faces);
  /// Axis-aligned box [lo, hi]^d as a polyhedron with 2d faces.
  static DomainSpec box(int dim, double lo, double hi);

  DomainSpec with_boundary_tolerance(double eps_bd) const;
  DomainSpec with_cone_condition(ConeCondition cone) const;

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  bool is_convex() const noexcept { return kind_ != DomainKind::BallExterior; }

  /// Exterior sphere radius; +infinity for convex kinds.
  double r0() const noexcept;
  ConeCondition cone_condition() const noexcept { return cone_; }
  /// Curvature constant gamma; only housed for convex kinds (f == 0).
  std::optional<double> gamma() const noexcept;
  bool f_is_zero() const noexcept { return is_convex(); }
  double eps_bd() const noexcept { return eps_bd_; }

  const Vec& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  const std::vector<HalfSpaceConstraint>& faces() const noexcept { return faces_; }

  /// Width of the boundary band around x: eps_bd * (1 + |x|).
  double boundary_band(const Vec& x) const noexcept { return eps_bd_ * (1.0 + x.norm()); }

  Membership classify(const Vec& x) const;

  /// Distance from x to the closure of D (zero inside).
  double distance_to_closure(const Vec& x) const;

  /// Nearest point of the closure of D.
  Vec project(const Vec& x) const { return x + projection_correction(x); }

  /// project(x) - x. Computed from the geometry directly (not as a
  /// difference of two nearby points) so its direction is accurate even
  /// when it is tiny.
  Vec projection_correction(const Vec& x) const;

  NormalCone inward_normal_witness(const Vec& x) const;

  /// True iff the open ball B(x - r n, r) misses D.
  bool is_inward_normal(const Vec& x, const Vec& n, double r) const;

  /// Angle in radians between the unit vector u and the inward normal set
  /// at the boundary point x (zero when u belongs to it).
  double normal_cone_angle(const Vec& x, const Vec& u) const;

  bool operator==(const DomainSpec& other) const;

 private:
  DomainSpec() = default;

  void require_dim(const Vec& x) const;
  Vec polyhedron_correction(const Vec& x) const;

  DomainKind kind_ = DomainKind::WholeSpace;
  int dim_ = 0;
  Vec center_;
  double radius_ = 0.0;
  std::vector<HalfSpaceConstraint> faces_;  // HalfSpace uses faces_[0]
  ConeCondition cone_;
  double eps_bd_ = kDefaultBoundaryTolerance;
};

}  // namespace reflectsde
