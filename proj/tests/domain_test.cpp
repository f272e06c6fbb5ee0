#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "reflectsde/domain.hpp"
#include "reflectsde/error.hpp"
#include "support/test_util.hpp"

namespace reflectsde {
namespace {

using testing::vec;

DomainSpec unit_square() { return DomainSpec::box(2, 0.0, 1.0); }

std::vector<DomainSpec> builtin_domains() {
  return {
      DomainSpec::half_space(vec({0.0, 1.0}), 0.0),
      DomainSpec::ball(vec({0.0, 0.0}), 1.0),
      DomainSpec::ball_exterior(vec({0.0, 0.0}), 1.0),
      unit_square(),
  };
}

std::vector<Vec> boundary_samples(const DomainSpec& d) {
  std::vector<Vec> out;
  switch (d.kind()) {
    case DomainKind::HalfSpace:
      for (double s : {-3.0, -0.5, 0.0, 0.7, 10.0}) out.push_back(vec({s, 0.0}));
      break;
    case DomainKind::Ball:
    case DomainKind::BallExterior:
      for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * M_PI * k / 16.0;
        out.push_back(vec({std::cos(a), std::sin(a)}));
      }
      break;
    case DomainKind::ConvexPolyhedron:
      for (double s : {0.0, 0.25, 0.5, 1.0}) {
        out.push_back(vec({s, 0.0}));
        out.push_back(vec({s, 1.0}));
        out.push_back(vec({0.0, s}));
        out.push_back(vec({1.0, s}));
      }
      break;
    default:
      break;
  }
  return out;
}

TEST(DomainClassify, Examples) {
  EXPECT_EQ(DomainSpec::ball(vec({0, 0}), 1.0).classify(vec({0.5, 0})), Membership::Interior);
  EXPECT_EQ(DomainSpec::half_space(vec({1, 0}), 0.0).classify(vec({0, 3})), Membership::Boundary);
  EXPECT_EQ(DomainSpec::ball_exterior(vec({0, 0}), 1.0).classify(vec({0.2, 0})), Membership::Exterior);
  EXPECT_EQ(DomainSpec::whole_space(3).classify(vec({1e9, -4, 2})), Membership::Interior);
  EXPECT_EQ(unit_square().classify(vec({1.5, 0.5})), Membership::Exterior);
  EXPECT_EQ(unit_square().classify(vec({1.0, 1.0})), Membership::Boundary);
  EXPECT_EQ(unit_square().classify(vec({0.5, 0.5})), Membership::Interior);
}

TEST(DomainClassify, BoundaryBandScalesWithPoint) {
  const auto half = DomainSpec::half_space(vec({1, 0}), 0.0);
  // band = 1e-10 (1 + |x|); |x| ~ 1e4 gives a band of ~1e-6.
  EXPECT_EQ(half.classify(vec({5e-7, 1e4})), Membership::Boundary);
  EXPECT_EQ(half.classify(vec({5e-7, 0.0})), Membership::Interior);
  EXPECT_EQ(half.classify(vec({-5e-11, 0.0})), Membership::Boundary);
}

TEST(DomainClassify, RejectsNonFinite) {
  const auto ball = DomainSpec::ball(vec({0, 0}), 1.0);
  try {
    ball.classify(vec({std::numeric_limits<double>::quiet_NaN(), 0}));
    FAIL() << "expected NonFiniteInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteInput);
  }
  EXPECT_THROW(ball.project(vec({std::numeric_limits<double>::infinity(), 0})), Error);
}

TEST(DomainConstruction, RejectsInvalidParameters) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ParseError;  // sentinel: nothing thrown
  };
  EXPECT_EQ(code_of([] { DomainSpec::ball(vec({0, 0}), -1.0); }), Errc::InvalidDomain);
  EXPECT_EQ(code_of([] { DomainSpec::ball(vec({0, 0}), 0.0); }), Errc::InvalidDomain);
  EXPECT_EQ(code_of([] { DomainSpec::half_space(vec({1, 1}), 0.0); }), Errc::InvalidDomain);
  // x > 1 and x < 0 cannot both hold.
  EXPECT_EQ(code_of([] {
              DomainSpec::convex_polyhedron({{vec({1, 0}), 1.0}, {vec({-1, 0}), 0.0}});
            }),
            Errc::InvalidDomain);
  // x >= 0 and x <= 0: closure is a line, interior empty.
  EXPECT_EQ(code_of([] {
              DomainSpec::convex_polyhedron({{vec({1, 0}), 0.0}, {vec({-1, 0}), 0.0}});
            }),
            Errc::InvalidDomain);
  EXPECT_EQ(code_of([] { DomainSpec::whole_space(2).with_boundary_tolerance(0.0); }), Errc::InvalidDomain);
  EXPECT_EQ(code_of([] { DomainSpec::whole_space(2).with_cone_condition({1.0, 0.5}); }), Errc::InvalidDomain);
}

TEST(DomainMetadata, ExteriorSphereRadiusAndCurvature) {
  EXPECT_TRUE(std::isinf(DomainSpec::ball(vec({0, 0}), 2.0).r0()));
  EXPECT_TRUE(std::isinf(unit_square().r0()));
  EXPECT_DOUBLE_EQ(DomainSpec::ball_exterior(vec({0, 0}), 2.0).r0(), 2.0);
  EXPECT_TRUE(unit_square().gamma().has_value());
  EXPECT_TRUE(unit_square().f_is_zero());
  EXPECT_FALSE(DomainSpec::ball_exterior(vec({0, 0}), 2.0).gamma().has_value());
  EXPECT_FALSE(DomainSpec::ball_exterior(vec({0, 0}), 2.0).f_is_zero());
  // Unit square: the diagonal direction makes angle pi/4 with both corner normals.
  EXPECT_NEAR(unit_square().cone_condition().beta, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(DomainSpec::ball(vec({0, 0}), 2.0).cone_condition().beta, 8.0 / 7.0, 1e-15);
  EXPECT_DOUBLE_EQ(DomainSpec::ball(vec({0, 0}), 2.0).cone_condition().delta, 1.0);
}

TEST(DomainProject, Examples) {
  const Vec a = DomainSpec::half_space(vec({1, 0}), 0.0).project(vec({-1, 2}));
  EXPECT_EQ(a, vec({0, 2}));
  const Vec b = DomainSpec::ball(vec({0, 0}), 1.0).project(vec({2, 0}));
  EXPECT_NEAR((b - vec({1, 0})).norm(), 0.0, 1e-15);
  const Vec c = unit_square().project(vec({1.5, 1.5}));
  EXPECT_NEAR((c - vec({1, 1})).norm(), 0.0, 1e-14);
  const Vec d = DomainSpec::ball_exterior(vec({0, 0}), 1.0).project(vec({0.25, 0}));
  EXPECT_NEAR((d - vec({1, 0})).norm(), 0.0, 1e-15);
  const Vec e = DomainSpec::whole_space(2).project(vec({7, -3}));
  EXPECT_EQ(e, vec({7, -3}));
}

// Nearest point of the closed unit square by exhaustive grid search.
Vec brute_force_square_projection(const Vec& x, double h) {
  Vec best = vec({0, 0});
  double best_d = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::lround(1.0 / h));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Vec y = vec({i * h, j * h});
      const double d = (x - y).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = y;
      }
    }
  }
  return best;
}

TEST(DomainProject, PolyhedronMatchesGridSearch) {
  const auto sq = unit_square();
  const double h = 1e-3;
  for (const Vec& x : {vec({1.5, 1.5}), vec({-0.3, 0.4}), vec({0.2, 1.7}), vec({-2.0, -0.1}), vec({1.25, -0.6})}) {
    const Vec oracle = brute_force_square_projection(x, h);
    EXPECT_LE((sq.project(x) - oracle).norm(), h) << x.transpose();
  }
}

TEST(DomainProject, TriangleCornerAndEdge) {
  // Triangle x >= 0, y >= 0, x + y <= 1.
  const double s = 1.0 / std::sqrt(2.0);
  const auto tri = DomainSpec::convex_polyhedron({{vec({1, 0}), 0.0}, {vec({0, 1}), 0.0}, {vec({-s, -s}), -s}});
  EXPECT_NEAR((tri.project(vec({1, 1})) - vec({0.5, 0.5})).norm(), 0.0, 1e-14);
  EXPECT_NEAR((tri.project(vec({2, -1})) - vec({1, 0})).norm(), 0.0, 1e-14);
  EXPECT_NEAR((tri.project(vec({-1, -1})) - vec({0, 0})).norm(), 0.0, 1e-14);
}

TEST(DomainProject, ExteriorCenterIsOutOfReach) {
  const auto ext = DomainSpec::ball_exterior(vec({1, 1}), 0.5);
  try {
    ext.project(vec({1, 1}));
    FAIL() << "expected ProjectionOutOfReach";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ProjectionOutOfReach);
  }
}

TEST(DomainNormals, WitnessExamples) {
  auto ball = DomainSpec::ball(vec({0, 0}), 1.0);
  auto cone = ball.inward_normal_witness(vec({1, 0}));
  ASSERT_EQ(cone.generators.size(), 1u);
  EXPECT_FALSE(cone.is_cone);
  EXPECT_NEAR((cone.generators[0] - vec({-1, 0})).norm(), 0.0, 1e-15);

  cone = DomainSpec::ball_exterior(vec({0, 0}), 1.0).inward_normal_witness(vec({1, 0}));
  ASSERT_EQ(cone.generators.size(), 1u);
  EXPECT_NEAR((cone.generators[0] - vec({1, 0})).norm(), 0.0, 1e-15);

  cone = unit_square().inward_normal_witness(vec({0, 0}));
  ASSERT_EQ(cone.generators.size(), 2u);
  EXPECT_TRUE(cone.is_cone);
  EXPECT_EQ(cone.generators[0], vec({1, 0}));
  EXPECT_EQ(cone.generators[1], vec({0, 1}));

  try {
    ball.inward_normal_witness(vec({0.5, 0}));
    FAIL() << "expected NotOnBoundary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotOnBoundary);
  }
}

TEST(DomainNormals, IsInwardNormalExamples) {
  EXPECT_TRUE(DomainSpec::ball(vec({0, 0}), 1.0).is_inward_normal(vec({1, 0}), vec({-1, 0}), 5.0));
  const auto ext = DomainSpec::ball_exterior(vec({0, 0}), 1.0);
  EXPECT_TRUE(ext.is_inward_normal(vec({1, 0}), vec({1, 0}), 1.0));
  EXPECT_FALSE(ext.is_inward_normal(vec({1, 0}), vec({1, 0}), 1.5));
  EXPECT_FALSE(DomainSpec::ball(vec({0, 0}), 1.0).is_inward_normal(vec({1, 0}), vec({0, 1}), 0.1));

  try {
    ext.is_inward_normal(vec({1, 0}), vec({2, 0}), 1.0);
    FAIL() << "expected NonUnitVector";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonUnitVector);
  }
  try {
    ext.is_inward_normal(vec({3, 0}), vec({1, 0}), 1.0);
    FAIL() << "expected NotOnBoundary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotOnBoundary);
  }
}

// Samples B(x - r n, r) on a grid and reports whether any sample lies in D.
bool ball_hits_domain_by_sampling(const DomainSpec& d, const Vec& x, const Vec& n, double r) {
  const Vec z = x - r * n;
  const int m = 400;
  for (int i = -m; i <= m; ++i) {
    for (int j = -m; j <= m; ++j) {
      const Vec y = z + vec({r * i / m, r * j / m});
      if ((y - z).norm() >= r) continue;
      if (d.classify(y) == Membership::Interior) return true;
    }
  }
  return false;
}

TEST(DomainNormals, IsInwardNormalAgreesWithSampling) {
  const auto ext = DomainSpec::ball_exterior(vec({0, 0}), 1.0);
  EXPECT_TRUE(ball_hits_domain_by_sampling(ext, vec({1, 0}), vec({1, 0}), 1.5));
  EXPECT_FALSE(ball_hits_domain_by_sampling(ext, vec({1, 0}), vec({1, 0}), 0.9));
  const auto ball = DomainSpec::ball(vec({0, 0}), 1.0);
  EXPECT_FALSE(ball_hits_domain_by_sampling(ball, vec({0, 1}), vec({0, -1}), 3.0));
  EXPECT_TRUE(ball_hits_domain_by_sampling(ball, vec({0, 1}), vec({1, 0}), 0.5));
}

TEST(DomainInvariants, ExteriorSphereConditionHoldsWithStoredRadius) {
  for (const auto& d : builtin_domains()) {
    const double r0 = std::isinf(d.r0()) ? 1e3 : d.r0();
    for (const Vec& x : boundary_samples(d)) {
      for (const Vec& n : d.inward_normal_witness(x).generators) {
        for (double frac : {1e-3, 0.1, 0.5, 1.0}) {
          EXPECT_TRUE(d.is_inward_normal(x, n, frac * r0))
              << to_string(d.kind()) << " x=" << x.transpose() << " r=" << frac * r0;
        }
      }
    }
  }
}

TEST(DomainInvariants, ProjectionIsIdempotentAndConsistent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& d : builtin_domains()) {
    for (int i = 0; i < 500; ++i) {
      Vec x = vec({u(rng), u(rng)});
      if (d.kind() == DomainKind::BallExterior && x.norm() < 1e-6) continue;
      const Vec p = d.project(x);
      EXPECT_LE((d.project(p) - p).norm(), 1e-12);
      EXPECT_NE(d.classify(p), Membership::Exterior);
      if (d.classify(x) != Membership::Exterior) {
        EXPECT_LE((p - x).norm(), d.boundary_band(x));
      }
    }
  }
}

TEST(DomainInvariants, ConvexProjectionVariationalInequality) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& d : builtin_domains()) {
    if (!d.is_convex()) continue;
    for (int i = 0; i < 50; ++i) {
      const Vec x = vec({u(rng), u(rng)});
      const Vec p = d.project(x);
      for (int k = 0; k < 100; ++k) {
        const Vec z = d.project(vec({u(rng), u(rng)}));
        EXPECT_LE((x - p).dot(z - p), 1e-9);
      }
    }
  }
}

TEST(DomainNormals, ConeAngle) {
  const auto sq = unit_square();
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(sq.normal_cone_angle(vec({0, 0}), vec({s, s})), 0.0, 1e-12);
  EXPECT_NEAR(sq.normal_cone_angle(vec({0, 0}), vec({1, 0})), 0.0, 1e-12);
  EXPECT_NEAR(sq.normal_cone_angle(vec({0, 0}), vec({s, -s})), M_PI / 4, 1e-12);
  EXPECT_NEAR(sq.normal_cone_angle(vec({0.5, 0}), vec({0, 1})), 0.0, 1e-12);
  EXPECT_NEAR(sq.normal_cone_angle(vec({0.5, 0}), vec({1, 0})), M_PI / 2, 1e-12);
}

}  // namespace
}  // namespace reflectsde
