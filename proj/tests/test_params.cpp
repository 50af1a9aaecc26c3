#include <gtest/gtest.h>

#include "fracac/params.hpp"

using namespace fracac;

TEST(Sigma, ReferenceValues) {
  // Values from a 30-digit mpmath evaluation.
  EXPECT_NEAR(sigma_alpha(1.5), 1.59052366043797492, 1e-13);
  EXPECT_NEAR(sigma_alpha(1.7), 1.42390468938049696, 1e-13);
  EXPECT_NEAR(sigma_alpha(1.999), 1.00402, 5e-5);
  EXPECT_NEAR(sigma_alpha(1.0), std::sqrt(std::numbers::pi), 1e-13);
}

TEST(Sigma, TendsToOneAtTwo) {
  double prev = std::abs(sigma_alpha(1.9) - 1);
  for (double a : {1.99, 1.999, 1.9999}) {
    const double d = std::abs(sigma_alpha(a) - 1);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Params, LogExampleDerivedQuantities) {
  const ModelParams p(1.5, 0.1, ScalingPreset::log_example());
  EXPECT_NEAR(p.I_val, 0.230258509299404568, 1e-15);
  EXPECT_NEAR(p.branch_rate, 100.0, 1e-12);
  EXPECT_NEAR(p.speed, 1.59052366043797492 * std::pow(p.I_val, -0.5), 1e-12);
  EXPECT_NEAR(p.trunc_level, p.I_val * p.I_val / 3.0, 1e-15);
  EXPECT_NEAR(p.b_eps, 0.01 / (0.01 + p.I_val * p.I_val), 1e-15);
  EXPECT_NEAR(p.u_minus() + p.u_plus(), 1.0, 1e-14);
}

TEST(Params, InterfaceErrorReference) {
  const ModelParams p(1.5, 0.1, ScalingPreset::log_example());
  EXPECT_NEAR(F_eps(p), 3.11000187660019, 1e-12);
  EXPECT_THROW(F_eps(ModelParams(2.0, 0.1, ScalingPreset::log_example())), std::domain_error);
}

TEST(Params, InterfaceErrorVanishes) {
  double prev = 1e300;
  for (int m = 2; m <= 12; ++m) {
    const double f = F_eps(ModelParams(1.5, std::pow(10.0, -m), ScalingPreset::log_example()));
    EXPECT_LT(f, prev) << "m=" << m;
    prev = f;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Params, PowerExample) {
  const ModelParams p(1.5, 0.25, ScalingPreset::power_example());
  EXPECT_NEAR(ScalingPreset::power_example_exponent(1.5), 5.5 / 7.5, 1e-15);
  EXPECT_NEAR(p.I_val, 0.36181730936, 1e-10);
  EXPECT_NEAR(p.b_eps, 0.32314476778, 1e-10);
}

TEST(Params, PowerRangeValidated) {
  EXPECT_THROW(ModelParams(1.5, 0.1, ScalingPreset::power(0.6)), std::domain_error);
  EXPECT_THROW(ModelParams(1.5, 0.1, ScalingPreset::power(1.0)), std::domain_error);
  EXPECT_NO_THROW(ModelParams(1.5, 0.1, ScalingPreset::power(0.7)));
}

TEST(Params, PhasesMissingAboveThird) {
  const ModelParams p(1.5, 0.3, ScalingPreset::log_example());
  EXPECT_NEAR(p.b_eps, 0.40823816225, 1e-10);
  EXPECT_THROW(p.phases(), std::domain_error);
}

TEST(Params, RejectsBadDomain) {
  EXPECT_THROW(ModelParams(1.0, 0.1, ScalingPreset::log_example()), std::domain_error);
  EXPECT_THROW(ModelParams(2.1, 0.1, ScalingPreset::log_example()), std::domain_error);
  EXPECT_THROW(ModelParams(1.5, 1.0, ScalingPreset::log_example()), std::domain_error);
}

TEST(Params, PresetParseRoundTrip) {
  for (auto s : {ScalingPreset::log_example(), ScalingPreset::power_example(), ScalingPreset::power(0.7)})
    EXPECT_EQ(ScalingPreset::parse(s.name()), s);
  EXPECT_THROW(ScalingPreset::parse("cubic"), std::invalid_argument);
}

TEST(Params, AssumptionReportPresets) {
  std::vector<double> grid;
  for (int m = 1; m <= 12; ++m) grid.push_back(std::pow(10.0, -m));
  EXPECT_TRUE(assumption_report(ScalingPreset::log_example(), 1.5, grid).all_ok());
  EXPECT_TRUE(assumption_report(ScalingPreset::power_example(), 1.5, grid).all_ok());
  // I = eps does not make the marking quantity vanish.
  const auto bad = assumption_report([](double e) { return e; }, 1.5, grid);
  EXPECT_FALSE(bad.marking_decreasing);
}
