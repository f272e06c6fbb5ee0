#include <gtest/gtest.h>

#include <cmath>

#include "reflectsde/brownian.hpp"
#include "reflectsde/philox.hpp"
#include "support/test_util.hpp"

namespace reflectsde {
namespace {

using testing::error_code;

// Known-answer vectors published with the Random123 distribution.
TEST(Philox, KnownAnswerVectors) {
  using philox::Counter;
  EXPECT_EQ(philox::philox4x32_10({0, 0, 0, 0}, {0, 0}), (Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, OpenUnitIntervalExcludesEndpoints) {
  EXPECT_GT(philox::to_open_unit(0, 0), 0.0);
  EXPECT_LT(philox::to_open_unit(0xffffffff, 0xffffffff), 1.0);
  EXPECT_TRUE(std::isfinite(philox::standard_normal({0, 0, 0, 0}, {0, 0})));
}

TEST(Brownian, GridStartAndShape) {
  const BrownianGenerator gen{42, 2, 2.0, 12};
  const auto b = sample_brownian(gen, 5, 7);
  ASSERT_EQ(b.size(), 33u);
  EXPECT_EQ(b.dim(), 2);
  EXPECT_EQ(b.value(0), Vec::Zero(2));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.time(i), 2.0 * static_cast<double>(i) / 32.0);
  EXPECT_EQ(b.horizon(), 2.0);
}

TEST(Brownian, DeterministicAndKeyedByPathAndSeed) {
  const BrownianGenerator gen{42, 3, 1.0, 12};
  EXPECT_EQ(sample_brownian(gen, 8, 3), sample_brownian(gen, 8, 3));
  EXPECT_NE(sample_brownian(gen, 8, 3), sample_brownian(gen, 8, 4));
  EXPECT_NE(sample_brownian(gen, 8, 3), sample_brownian({43, 3, 1.0, 12}, 8, 3));
  // High path-id bits reach the counter too.
  EXPECT_NE(sample_brownian(gen, 4, 1), sample_brownian(gen, 4, 1 + (std::uint64_t{1} << 32)));
}

TEST(Brownian, LevelsAreCoupledBitForBit) {
  const BrownianGenerator gen{2024, 2, 1.5, 14};
  for (std::uint64_t id : {0ull, 1ull, 999ull}) {
    const auto fine = sample_brownian(gen, 12, id);
    for (int level = 0; level <= 12; ++level) {
      EXPECT_EQ(restrict_to_level(fine, 12, level), sample_brownian(gen, level, id)) << "level " << level;
    }
  }
}

TEST(Brownian, RejectsBadLevels) {
  const BrownianGenerator gen{1, 1, 1.0, 10};
  EXPECT_EQ(error_code([&] { sample_brownian(gen, 11); }), Errc::LevelTooDeep);
  EXPECT_EQ(error_code([&] { sample_brownian(gen, -1); }), Errc::LevelTooDeep);
  EXPECT_EQ(error_code([] { validate(BrownianGenerator{1, 1, 0.0, 10}); }), Errc::ConfigError);
  EXPECT_EQ(error_code([] { validate(BrownianGenerator{1, 1, 1.0, 31}); }), Errc::ConfigError);
  const auto b = sample_brownian(gen, 4);
  EXPECT_EQ(error_code([&] { restrict_to_level(b, 4, 5); }), Errc::LevelTooDeep);
}

// Increment moments over many paths: mean 0, variance dt, independent
// coordinates. Tolerances are five standard errors.
TEST(BrownianStatistics, IncrementMoments) {
  const double horizon = 2.0;
  const BrownianGenerator gen{7, 2, horizon, 10};
  const int level = 3;
  const double dt = horizon / 8.0;
  const int paths = 4000;
  double sum = 0.0;
  double sum_sq = 0.0;
  double cross = 0.0;
  double endpoint_sq = 0.0;
  std::size_t count = 0;
  for (int m = 0; m < paths; ++m) {
    const auto b = sample_brownian(gen, level, static_cast<std::uint64_t>(m));
    for (std::size_t i = 1; i < b.size(); ++i) {
      const Vec d = b.value(i) - b.value(i - 1);
      sum += d(0);
      sum_sq += d(0) * d(0);
      cross += d(0) * d(1);
      ++count;
    }
    endpoint_sq += b.coord(b.size() - 1, 1) * b.coord(b.size() - 1, 1);
  }
  const double n = static_cast<double>(count);
  EXPECT_NEAR(sum / n, 0.0, 5.0 * std::sqrt(dt / n));
  EXPECT_NEAR(sum_sq / n, dt, 5.0 * dt * std::sqrt(2.0 / n));
  EXPECT_NEAR(cross / n, 0.0, 5.0 * dt / std::sqrt(n));
  EXPECT_NEAR(endpoint_sq / paths, horizon, 5.0 * horizon * std::sqrt(2.0 / paths));
}

TEST(BrownianStatistics, QuadraticVariationOfFinePath) {
  const BrownianGenerator gen{11, 1, 1.0, 16};
  const int level = 14;
  const double n = std::ldexp(1.0, level);
  for (std::uint64_t id = 0; id < 4; ++id) {
    const auto b = sample_brownian(gen, level, id);
    double qv = 0.0;
    for (std::size_t i = 1; i < b.size(); ++i) {
      const double d = b.coord(i, 0) - b.coord(i - 1, 0);
      qv += d * d;
    }
    EXPECT_NEAR(qv, 1.0, 5.0 * std::sqrt(2.0 / n));
  }
}

}  // namespace
}  // namespace reflectsde
