#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "reflectsde/converge.hpp"
#include "support/test_util.hpp"

namespace reflectsde {
namespace {

using coefficients::Drift;
using testing::error_code;
using testing::vec;

StudyConfig halfline_study() {
  StudyConfig cfg{DomainSpec::half_space(vec({1.0}), 0.0), coefficients::constant_sigma(1, 1, 1.0, Drift::NegTanh)};
  cfg.levels = {2, 3, 4, 5};
  cfg.paths = 200;
  cfg.seed = 99;
  cfg.x0 = vec({0.5});
  return cfg;
}

TEST(FitRate, Examples) {
  const std::vector<double> deltas{1.0, 0.5, 0.25, 0.125};
  std::vector<double> power;
  for (double d : deltas) power.push_back(std::sqrt(d));
  EXPECT_NEAR(fit_rate(deltas, power), 0.5, 1e-14);
  EXPECT_NEAR(fit_rate(deltas, std::vector<double>{0.3, 0.3, 0.3, 0.3}), 0.0, 1e-14);
  // Reference slope from an independent least-squares solve.
  EXPECT_NEAR(fit_rate(deltas, std::vector<double>{1.0, 0.51, 0.27, 0.13}), 0.9747787254708925, 1e-12);
  EXPECT_NEAR(fit_rate(std::vector<int>{0, 1, 2, 3}, std::vector<double>{1.0, 0.51, 0.27, 0.13}),
              0.9747787254708925, 1e-12);
}

TEST(FitRate, Degenerate) {
  EXPECT_EQ(error_code([] { fit_rate(std::vector<double>{1.0, 0.5}, std::vector<double>{1.0, 0.7}); }),
            Errc::DegenerateFit);
  EXPECT_EQ(error_code([] {
              fit_rate(std::vector<double>{1.0, 0.5, 0.25}, std::vector<double>{1.0, 0.0, 0.1});
            }),
            Errc::DegenerateFit);
}

TEST(StudyConfigValidation, RejectsBadFields) {
  auto expect_config_error = [](auto mutate, const char* field) {
    StudyConfig cfg = halfline_study();
    mutate(cfg);
    try {
      validate(cfg);
      ADD_FAILURE() << "no error for " << field;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ConfigError);
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_config_error([](StudyConfig& c) { c.paths = 99; }, "paths");
  expect_config_error([](StudyConfig& c) { c.p = 3; }, "p:");
  expect_config_error([](StudyConfig& c) { c.levels = {3, 3, 4}; }, "levels");
  expect_config_error([](StudyConfig& c) { c.levels = {4, 19}; }, "levels");
  expect_config_error([](StudyConfig& c) { c.x0 = vec({0, 0}); }, "x0");
  EXPECT_NO_THROW(validate(halfline_study()));
  EXPECT_EQ(halfline_study().ref_level(), 7);
}

TEST(StrongErrorStudy, SyntheticInjectionRecoversHalf) {
  StudyConfig cfg = halfline_study();
  cfg.scheme = StudyScheme::SyntheticInjection;
  cfg.paths = 100;
  const auto report = strong_error_study(cfg);
  ASSERT_EQ(report.rate_status, RateStatus::Fitted);
  EXPECT_NEAR(*report.fitted_rate, 0.5, 1e-6);
  for (const auto& row : report.rows) EXPECT_NEAR(row.error, std::sqrt(row.delta), 1e-12);
}

TEST(StrongErrorStudy, ConstantSigmaWholeSpaceIsExact) {
  StudyConfig cfg{DomainSpec::whole_space(2), coefficients::constant_sigma(2, 2, 1.0)};
  cfg.levels = {2, 3, 4};
  cfg.paths = 100;
  cfg.x0 = vec({0.0, 1.0});
  const auto report = strong_error_study(cfg);
  EXPECT_EQ(report.rate_status, RateStatus::ExactScheme);
  EXPECT_FALSE(report.fitted_rate.has_value());
  for (const auto& row : report.rows) EXPECT_EQ(row.error, 0.0);
  EXPECT_EQ(to_json(report)["fitted_rate"], "exact");
}

TEST(StrongErrorStudy, EulerPeanoErrorDecreases) {
  const auto report = strong_error_study(halfline_study());
  ASSERT_EQ(report.rows.size(), 4u);
  for (const auto& row : report.rows) {
    EXPECT_GT(row.error, 0.0);
    EXPECT_GT(row.std_error, 0.0);
    EXPECT_LT(row.std_error, row.error);
  }
  EXPECT_LT(report.rows.back().error, report.rows.front().error);
  EXPECT_EQ(report.failed_paths, 0);
  EXPECT_EQ(report.ref_level, 7);
}

TEST(StrongErrorStudy, ResultsIndependentOfThreadCount) {
  StudyConfig cfg = halfline_study();
  cfg.scheme = StudyScheme::WongZakai;
  cfg.substeps = 4;
  const auto one = strong_error_study(cfg);
  cfg.threads = 3;
  const auto three = strong_error_study(cfg);
  EXPECT_EQ(to_json(one).dump(), to_json(three).dump());
  std::ostringstream a;
  std::ostringstream b;
  write_csv(a, one);
  write_csv(b, three);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_FALSE(to_json(one)["config"].contains("threads"));
}

TEST(StrongErrorStudy, FailureBudget) {
  StudyConfig cfg{DomainSpec::ball_exterior(vec({0, 0}), 0.05), coefficients::constant_sigma(2, 2, 1.0)};
  cfg.levels = {1, 2, 3};
  cfg.paths = 100;
  cfg.x0 = vec({0.2, 0.0});
  EXPECT_EQ(error_code([&] { strong_error_study(cfg); }), Errc::PathFailureBudgetExceeded);
}

TEST(StrongErrorStudy, CsvLayout) {
  StudyConfig cfg = halfline_study();
  cfg.scheme = StudyScheme::SyntheticInjection;
  cfg.paths = 100;
  cfg.levels = {2, 3};
  const auto report = strong_error_study(cfg);
  EXPECT_EQ(report.rate_status, RateStatus::TooFewLevels);
  std::ostringstream out;
  write_csv(out, report);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "level,N,delta,error,stderr");
  EXPECT_EQ(lines[1].rfind("2,4,0.25,0.5", 0), 0u) << lines[1];
  EXPECT_EQ(lines[2].rfind("3,8,0.125,0.35355339059327", 0), 0u) << lines[2];
  EXPECT_EQ(lines[3], "fitted_rate=none");
}

TEST(DriftStudy, ConstantSigmaReferencesCoincide) {
  StudyConfig cfg = halfline_study();
  cfg.substeps = 4;
  const auto report = drift_correction_study(cfg);
  EXPECT_EQ(report.correction_magnitude, 0.0);
  for (const auto& row : report.rows) {
    EXPECT_LE(std::abs(row.vs_stratonovich.error - row.vs_ito.error), 2.0 * row.vs_stratonovich.std_error);
  }
  EXPECT_EQ(to_json(report)["config"]["scheme"], "wong_zakai");
}

TEST(DriftStudy, StateDependentSigmaPrefersCorrectedDrift) {
  StudyConfig cfg{DomainSpec::whole_space(1), coefficients::diag_tanh(1)};
  cfg.levels = {2, 3, 4};
  cfg.paths = 400;
  cfg.seed = 5;
  cfg.x0 = vec({0.0});
  cfg.substeps = 8;
  const auto report = drift_correction_study(cfg);
  EXPECT_GT(report.correction_magnitude, 0.1);
  const auto& last = report.rows.back();
  EXPECT_LT(last.vs_stratonovich.error, last.vs_ito.error);
}

}  // namespace
}  // namespace reflectsde
