#include "reflectsde/domain.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "reflectsde/error.hpp"

namespace reflectsde {

namespace {

constexpr double kUnitTolerance = 1e-12;

void require_finite(const Vec& x, const char* what) {
  if (!x.allFinite()) {
    throw Error(Errc::NonFiniteInput, std::string(what) + " has a non-finite coordinate");
  }
}

// Calls visit(indices) for every k-subset of {0..n-1} in lexicographic
// order; stops early when visit returns true.
template <typename Visit>
bool for_each_subset(int n, int k, Visit&& visit) {
  if (k > n || k <= 0) return false;
  std::vector<int> idx(static_cast<size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (visit(idx)) return true;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

Mat stack_rows(const std::vector<Vec>& rows, const std::vector<int>& idx, int dim) {
  Mat a(static_cast<Eigen::Index>(idx.size()), dim);
  for (size_t r = 0; r < idx.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = rows[static_cast<size_t>(idx[r])].transpose();
  }
  return a;
}

// Euclidean projection of x onto {y : a_i . y >= c_i + shift} by active-set
// enumeration over face subsets of size <= dim, smallest subsets first and
// lexicographic within a size. The first subset satisfying the KKT
// conditions wins. Returns the correction y - x.
std::optional<Vec> polyhedron_projection(const std::vector<HalfSpaceConstraint>& faces,
                                         const Vec& x, double shift) {
  const int dim = static_cast<int>(x.size());
  const int nfaces = static_cast<int>(faces.size());
  const double tol = 1e-12 * (1.0 + x.norm());

  bool inside = true;
  for (const auto& f : faces) {
    if (f.normal.dot(x) - f.offset - shift < 0.0) {
      inside = false;
      break;
    }
  }
  if (inside) return Vec::Zero(dim);

  std::vector<Vec> normals;
  normals.reserve(faces.size());
  for (const auto& f : faces) normals.push_back(f.normal);

  std::optional<Vec> result;
  for (int k = 1; k <= std::min(dim, nfaces) && !result; ++k) {
    for_each_subset(nfaces, k, [&](const std::vector<int>& idx) {
      const Mat a = stack_rows(normals, idx, dim);
      const Mat gram = a * a.transpose();
      Eigen::FullPivLU<Mat> lu(gram);
      lu.setThreshold(1e-12);
      if (lu.rank() < k) return false;
      Vec rhs(k);
      for (int r = 0; r < k; ++r) {
        const auto& f = faces[static_cast<size_t>(idx[static_cast<size_t>(r)])];
        rhs(r) = f.offset + shift - f.normal.dot(x);
      }
      Vec mu = lu.solve(rhs);
      if ((mu.array() < -tol).any()) return false;
      mu = mu.cwiseMax(0.0);
      const Vec correction = a.transpose() * mu;
      const Vec y = x + correction;
      for (const auto& f : faces) {
        if (f.normal.dot(y) - f.offset - shift < -tol) return false;
      }
      result = correction;
      return true;
    });
  }
  return result;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

std::string_view to_string(DomainKind kind) noexcept {
  switch (kind) {
    case DomainKind::WholeSpace: return "whole_space";
    case DomainKind::HalfSpace: return "half_space";
    case DomainKind::Ball: return "ball";
    case DomainKind::BallExterior: return "ball_exterior";
    case DomainKind::ConvexPolyhedron: return "polyhedron";
  }
  return "unknown";
}

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::Interior: return "interior";
    case Membership::Boundary: return "boundary";
    case Membership::Exterior: return "exterior";
  }
  return "unknown";
}

DomainSpec DomainSpec::whole_space(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(Errc::InvalidDomain, "dim must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  DomainSpec d;
  d.kind_ = DomainKind::WholeSpace;
  d.dim_ = dim;
  return d;
}

DomainSpec DomainSpec::half_space(const Vec& normal, double offset) {
  require_finite(normal, "normal");
  if (normal.size() < 1 || normal.size() > kMaxDim) throw Error(Errc::InvalidDomain, "normal: bad dimension");
  if (std::abs(normal.norm() - 1.0) > kUnitTolerance) throw Error(Errc::InvalidDomain, "normal: not a unit vector");
  if (!std::isfinite(offset)) throw Error(Errc::NonFiniteInput, "offset is not finite");
  DomainSpec d;
  d.kind_ = DomainKind::HalfSpace;
  d.dim_ = static_cast<int>(normal.size());
  d.faces_.push_back({normal, offset});
  return d;
}

DomainSpec DomainSpec::ball(const Vec& center, double radius) {
  require_finite(center, "center");
  if (center.size() < 1 || center.size() > kMaxDim) throw Error(Errc::InvalidDomain, "center: bad dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(Errc::InvalidDomain, "radius must be positive");
  DomainSpec d;
  d.kind_ = DomainKind::Ball;
  d.dim_ = static_cast<int>(center.size());
  d.center_ = center;
  d.radius_ = radius;
  // Normals at boundary points within R/2 of each other differ by an angle
  // with cosine >= 1 - (1/2)^2 / 2 = 7/8.
  d.cone_ = {radius / 2.0, 8.0 / 7.0};
  return d;
}

DomainSpec DomainSpec::ball_exterior(const Vec& center, double radius) {
  DomainSpec d = ball(center, radius);
  d.kind_ = DomainKind::BallExterior;
  return d;
}

DomainSpec DomainSpec::convex_polyhedron(std::vector<HalfSpaceConstraint> faces) {
  if (faces.empty()) throw Error(Errc::InvalidDomain, "faces: polyhedron needs at least one face");
  const auto dim = faces.front().normal.size();
  if (dim < 1 || dim > kMaxDim) throw Error(Errc::InvalidDomain, "faces: bad dimension");
  double scale = 1.0;
  for (const auto& f : faces) {
    if (f.normal.size() != dim) throw Error(Errc::InvalidDomain, "faces: mixed dimensions");
    require_finite(f.normal, "face normal");
    if (!std::isfinite(f.offset)) throw Error(Errc::NonFiniteInput, "face offset is not finite");
    if (std::abs(f.normal.norm() - 1.0) > kUnitTolerance) {
      throw Error(Errc::InvalidDomain, "faces: normal is not a unit vector");
    }
    scale = std::max(scale, std::abs(f.offset));
  }
  // Interior is non-empty iff a slightly shrunken polyhedron is non-empty.
  if (!polyhedron_projection(faces, Vec::Zero(dim), 1e-9 * scale)) {
    throw Error(Errc::InvalidDomain, "faces: polyhedron has empty interior");
  }

  DomainSpec d;
  d.kind_ = DomainKind::ConvexPolyhedron;
  d.dim_ = static_cast<int>(dim);
  d.faces_ = std::move(faces);

  // beta from the worst linearly independent family of at most dim faces,
  // using the normalized sum of their normals as the cone axis.
  std::vector<Vec> normals;
  for (const auto& f : d.faces_) normals.push_back(f.normal);
  double beta = 1.0;
  const int nfaces = static_cast<int>(normals.size());
  for (int k = 2; k <= std::min(d.dim_, nfaces); ++k) {
    for_each_subset(nfaces, k, [&](const std::vector<int>& idx) {
      const Mat a = stack_rows(normals, idx, d.dim_);
      Eigen::FullPivLU<Mat> lu(a);
      if (lu.rank() < k) return false;
      const Vec axis = a.colwise().sum().transpose();
      if (axis.norm() == 0.0) return false;
      const Vec l = axis.normalized();
      const double worst = (a * l).minCoeff();
      if (worst > 0.0) beta = std::max(beta, 1.0 / worst);
      return false;
    });
  }
  d.cone_ = {1.0, beta};
  return d;
}

DomainSpec DomainSpec::box(int dim, double lo, double hi) {
  if (!(hi > lo)) throw Error(Errc::InvalidDomain, "box: need lo < hi");
  std::vector<HalfSpaceConstraint> faces;
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e(i) = 1.0;
    faces.push_back({e, lo});
    faces.push_back({-e, -hi});
  }
  return convex_polyhedron(std::move(faces));
}

DomainSpec DomainSpec::with_boundary_tolerance(double eps_bd) const {
  if (!(eps_bd > 0.0) || !std::isfinite(eps_bd)) throw Error(Errc::InvalidDomain, "eps_bd must be positive");
  DomainSpec d = *this;
  d.eps_bd_ = eps_bd;
  return d;
}

DomainSpec DomainSpec::with_cone_condition(ConeCondition cone) const {
  if (!(cone.delta > 0.0)) throw Error(Errc::InvalidDomain, "delta must be positive");
  if (!(cone.beta >= 1.0)) throw Error(Errc::InvalidDomain, "beta must be >= 1");
  DomainSpec d = *this;
  d.cone_ = cone;
  return d;
}

double DomainSpec::r0() const noexcept {
  if (kind_ == DomainKind::BallExterior) return radius_;
  return std::numeric_limits<double>::infinity();
}

std::optional<double> DomainSpec::gamma() const noexcept {
  if (is_convex()) return 1.0;
  return std::nullopt;
}

void DomainSpec::require_dim(const Vec& x) const {
  if (x.size() != dim_) {
    throw Error(Errc::InvalidDomain, "point has dimension " + std::to_string(x.size()) +
                                         ", domain has " + std::to_string(dim_));
  }
  require_finite(x, "point");
}

Membership DomainSpec::classify(const Vec& x) const {
  require_dim(x);
  const double band = boundary_band(x);
  // Signed distance to the boundary, positive inside.
  double s = 0.0;
  switch (kind_) {
    case DomainKind::WholeSpace:
      return Membership::Interior;
    case DomainKind::HalfSpace:
      s = faces_[0].normal.dot(x) - faces_[0].offset;
      break;
    case DomainKind::Ball:
      s = radius_ - (x - center_).norm();
      break;
    case DomainKind::BallExterior:
      s = (x - center_).norm() - radius_;
      break;
    case DomainKind::ConvexPolyhedron: {
      // Inside a convex polyhedron the distance to the boundary is the
      // smallest face slack; outside, any violated face slack bounds the
      // distance to the closure from below.
      s = std::numeric_limits<double>::infinity();
      for (const auto& f : faces_) s = std::min(s, f.normal.dot(x) - f.offset);
      if (s < -band) {
        return distance_to_closure(x) <= band ? Membership::Boundary : Membership::Exterior;
      }
      break;
    }
  }
  if (std::abs(s) <= band) return Membership::Boundary;
  return s > 0.0 ? Membership::Interior : Membership::Exterior;
}

double DomainSpec::distance_to_closure(const Vec& x) const {
  return projection_correction(x).norm();
}

Vec DomainSpec::polyhedron_correction(const Vec& x) const {
  auto c = polyhedron_projection(faces_, x, 0.0);
  if (!c) throw Error(Errc::NonConvergent, "polyhedron projection found no KKT point");
  return *c;
}

Vec DomainSpec::projection_correction(const Vec& x) const {
  require_dim(x);
  switch (kind_) {
    case DomainKind::WholeSpace:
      return Vec::Zero(dim_);
    case DomainKind::HalfSpace: {
      const double s = faces_[0].normal.dot(x) - faces_[0].offset;
      if (s >= 0.0) return Vec::Zero(dim_);
      return (-s) * faces_[0].normal;
    }
    case DomainKind::Ball: {
      const Vec r = x - center_;
      const double dist = r.norm();
      if (dist <= radius_) return Vec::Zero(dim_);
      return r * (radius_ / dist - 1.0);
    }
    case DomainKind::BallExterior: {
      const Vec r = x - center_;
      const double dist = r.norm();
      if (dist >= radius_) return Vec::Zero(dim_);
      if (dist == 0.0) {
        throw Error(Errc::ProjectionOutOfReach, "point at the center of the removed ball");
      }
      return r * (radius_ / dist - 1.0);
    }
    case DomainKind::ConvexPolyhedron:
      return polyhedron_correction(x);
  }
  return Vec::Zero(dim_);
}

NormalCone DomainSpec::inward_normal_witness(const Vec& x) const {
  if (classify(x) != Membership::Boundary) {
    throw Error(Errc::NotOnBoundary, "inward normals requested off the boundary");
  }
  NormalCone cone;
  switch (kind_) {
    case DomainKind::WholeSpace:
      break;
    case DomainKind::HalfSpace:
      cone.generators.push_back(faces_[0].normal);
      break;
    case DomainKind::Ball:
      cone.generators.push_back((center_ - x).normalized());
      break;
    case DomainKind::BallExterior:
      cone.generators.push_back((x - center_).normalized());
      break;
    case DomainKind::ConvexPolyhedron: {
      const double band = boundary_band(x);
      for (const auto& f : faces_) {
        if (std::abs(f.normal.dot(x) - f.offset) <= band) cone.generators.push_back(f.normal);
      }
      break;
    }
  }
  cone.is_cone = cone.generators.size() > 1;
  return cone;
}

bool DomainSpec::is_inward_normal(const Vec& x, const Vec& n, double r) const {
  require_dim(x);
  require_dim(n);
  if (std::abs(n.norm() - 1.0) > 1e-9) throw Error(Errc::NonUnitVector, "n is not a unit vector");
  if (!(r > 0.0)) throw Error(Errc::InvalidDomain, "r must be positive");
  if (classify(x) != Membership::Boundary) throw Error(Errc::NotOnBoundary, "x is not on the boundary");

  const Vec z = x - r * n;
  const double tol = 1e-9 * (1.0 + r + x.norm());
  switch (kind_) {
    case DomainKind::WholeSpace:
      return false;
    case DomainKind::HalfSpace:
      return faces_[0].normal.dot(z) + r <= faces_[0].offset + tol;
    case DomainKind::Ball:
      return (z - center_).norm() >= r + radius_ - tol;
    case DomainKind::BallExterior:
      return (z - center_).norm() + r <= radius_ + tol;
    case DomainKind::ConvexPolyhedron:
      return distance_to_closure(z) >= r - tol;
  }
  return false;
}

double DomainSpec::normal_cone_angle(const Vec& x, const Vec& u) const {
  const NormalCone cone = inward_normal_witness(x);
  const Vec unit = u.normalized();
  if (cone.generators.empty()) return M_PI;
  if (!cone.is_cone) return std::acos(clamp_unit(unit.dot(cone.generators.front())));

  // Distance from u to the conic hull: the hull is the union of simplicial
  // cones over linearly independent generator subsets.
  const int ngen = static_cast<int>(cone.generators.size());
  double best_norm = 0.0;  // |projection|; empty subset projects to 0
  for (int k = 1; k <= std::min(dim_, ngen); ++k) {
    for_each_subset(ngen, k, [&](const std::vector<int>& idx) {
      const Mat a = stack_rows(cone.generators, idx, dim_);
      const Mat gram = a * a.transpose();
      Eigen::FullPivLU<Mat> lu(gram);
      if (lu.rank() < k) return false;
      const Vec lambda = lu.solve(Vec(a * unit));
      if ((lambda.array() < 0.0).any()) return false;
      const Vec p = a.transpose() * lambda;
      best_norm = std::max(best_norm, p.norm());
      return false;
    });
  }
  // For a convex cone, u . P(u) = |P(u)|^2, so the angle is acos |P(u)|.
  return std::acos(std::clamp(best_norm, 0.0, 1.0));
}

bool DomainSpec::operator==(const DomainSpec& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_ || eps_bd_ != other.eps_bd_) return false;
  if (radius_ != other.radius_ || center_.size() != other.center_.size()) return false;
  if (center_.size() > 0 && center_ != other.center_) return false;
  if (faces_.size() != other.faces_.size()) return false;
  for (size_t i = 0; i < faces_.size(); ++i) {
    if (faces_[i].normal != other.faces_[i].normal || faces_[i].offset != other.faces_[i].offset) return false;
  }
  return true;
}

}  // namespace reflectsde
