#include <gtest/gtest.h>

#include "fracac/estimator.hpp"

using namespace fracac;

namespace {

ModelParams log15(double eps = 0.2) { return ModelParams(1.5, eps, ScalingPreset::log_example()); }
const VoteScheme kMarkedStep{SchemeKind::Marked, InitialCondition::step(), LeafMarkRule::Lifetime};

}  // namespace

TEST(Estimator, ZeroTimeReturnsInitialData) {
  const auto e = estimate_u(log15(), Point::scalar(0.3), 0.0, MotionSpec::truncated(),
                            {SchemeKind::Majority, InitialCondition::step(0.0, 1.0)}, 500, 1);
  EXPECT_EQ(e.p_hat, 1.0);
  EXPECT_EQ(e.n, 500);
  const auto c = estimate_u(log15(), Point::scalar(0.3), 0.05, MotionSpec::truncated(),
                            {SchemeKind::Marked, InitialCondition::constant(1.0)}, 500, 1);
  EXPECT_GT(c.p_hat, 0.9);
}

TEST(Estimator, ConstantDataIsStationaryUnderMajority) {
  const auto e = estimate_u(log15(), Point::scalar(0.0), 0.05, MotionSpec::truncated(),
                            {SchemeKind::Majority, InitialCondition::constant(1.0)}, 500, 2);
  EXPECT_EQ(e.p_hat, 1.0);
}

TEST(Estimator, HalfAtTheStep) {
  const auto e = estimate_u(log15(), Point::scalar(0.0), 0.05, MotionSpec::truncated(), kMarkedStep, 20000, 3);
  EXPECT_NEAR(e.p_hat, 0.5, 3 * std::sqrt(0.25 / 20000));
  EXPECT_LE(e.lo, e.p_hat);
  EXPECT_GE(e.hi, e.p_hat);
}

TEST(Estimator, IdenticalAcrossWorkerCounts) {
  const ModelParams p = log15();
  std::vector<std::vector<std::int8_t>> runs;
  for (int w : {1, 4, 8}) {
    EstimatorOptions opt;
    opt.workers = w;
    runs.push_back(replicate_outcomes(p, Point::scalar(0.1), 0.05, MotionSpec::full(), kMarkedStep, 3000, 4, opt));
  }
  EXPECT_EQ(runs[0], runs[1]);
  EXPECT_EQ(runs[0], runs[2]);
}

TEST(Estimator, WilsonReference) {
  auto [lo, hi] = wilson_interval(0.5, 100);
  EXPECT_NEAR(lo, 0.4038315303659956, 1e-12);
  EXPECT_NEAR(hi, 0.5961684696340044, 1e-12);
  auto [lo0, hi0] = wilson_interval(0.0, 50);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 0.07134759913335872, 1e-12);
}

TEST(Estimator, IdenticalPairHasZeroDifference) {
  const auto c = estimate_coupled(log15(), Point::scalar(0.1), 0.05, MotionSpec::truncated(), kMarkedStep,
                                  MotionSpec::truncated(), kMarkedStep, 2000, 5);
  EXPECT_EQ(c.n10, 0);
  EXPECT_EQ(c.n01, 0);
  EXPECT_EQ(c.difference(), 0.0);
  EXPECT_EQ(c.paired_stderr(), 0.0);
}

TEST(Estimator, BiasedPairIsOrdered) {
  // Shared streams make the biased-plus vote dominate the biased-minus vote pathwise.
  const auto ic = InitialCondition::step();
  const auto c = estimate_coupled(log15(), Point::scalar(0.1), 0.05, MotionSpec::truncated(),
                                  {SchemeKind::BiasedMinus, ic}, MotionSpec::truncated(), {SchemeKind::BiasedPlus, ic},
                                  3000, 6);
  EXPECT_EQ(c.n10, 0);
  EXPECT_GT(c.n01, 0);
}

TEST(Estimator, StableAndSubordinatedDoNotCouple) {
  EXPECT_THROW(estimate_coupled(log15(), Point::scalar(0), 0.05, MotionSpec::stable(), kMarkedStep,
                                MotionSpec::full(), kMarkedStep, 10, 7),
               Uncouplable);
  EXPECT_THROW(check_couplable(MotionSpec::truncated(1, 1e-4), MotionSpec::full(1, 1e-3)), Uncouplable);
  EXPECT_NO_THROW(check_couplable(MotionSpec::truncated(), MotionSpec::full()));
}

TEST(Estimator, BudgetFailureReported) {
  EstimatorOptions opt;
  opt.lazy.node_budget = 20;
  EXPECT_THROW(estimate_u(log15(0.1), Point::scalar(0), 0.1, MotionSpec::truncated(), kMarkedStep, 100, 8, opt),
               BudgetFailure);
  opt.max_budget_failure = 1.0;
  const auto e = estimate_u(log15(0.1), Point::scalar(0), 0.1, MotionSpec::truncated(), kMarkedStep, 100, 8, opt);
  EXPECT_GT(e.budget_exhausted_count, 0);
  EXPECT_EQ(e.n + e.budget_exhausted_count, 100);
}

TEST(Estimator, RejectsBadArguments) {
  EXPECT_THROW(estimate_u(log15(), Point::scalar(0), 0.05, MotionSpec::truncated(), kMarkedStep, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(estimate_u(log15(), Point::scalar(0), -1.0, MotionSpec::truncated(), kMarkedStep, 10, 1),
               std::invalid_argument);
  EXPECT_THROW(estimate_u(log15(), Point::xy(0, 0), 0.05, MotionSpec::truncated(), kMarkedStep, 10, 1),
               std::invalid_argument);
}

TEST(Estimator, FeasibleTimeFlag) {
  const ModelParams p = log15(0.1);
  EXPECT_FALSE(exceeds_feasible_time(p, 0.05, {}));
  EXPECT_TRUE(exceeds_feasible_time(p, 0.1, {}));
}

TEST(Estimator, ScanIsMirrorSymmetric) {
  const ModelParams p = log15();
  const std::vector<double> grid{-0.6, -0.3, -0.1, 0.1, 0.3, 0.6};
  const auto r = interface_scan(p, 0.05, Point::scalar(0), Point::scalar(1), grid, MotionSpec::truncated(),
                                kMarkedStep, 4000, 9);
  ASSERT_TRUE(r.crossing.has_value());
  EXPECT_NEAR(*r.crossing, 0.0, 0.1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& a = r.estimates[i];
    const auto& b = r.estimates[grid.size() - 1 - i];
    EXPECT_NEAR(a.p_hat, 1 - b.p_hat, 4 * std::hypot(a.std_error, b.std_error) + 1e-3);
  }
  EXPECT_LT(r.isotonic_residual, 0.05);
  EXPECT_THROW(interface_scan(p, 0.05, Point::scalar(0), Point::scalar(1), {0.2, 0.1}, MotionSpec::truncated(),
                              kMarkedStep, 10, 9),
               std::invalid_argument);
}
