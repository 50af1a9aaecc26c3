#include <gtest/gtest.h>

#include "fracac/voting.hpp"

using namespace fracac;

TEST(Voting, MajorityPolynomial) {
  EXPECT_DOUBLE_EQ(g(0.5), 0.5);
  EXPECT_DOUBLE_EQ(g(1.0), 1.0);
  EXPECT_DOUBLE_EQ(g(0.2, 0.3, 0.4), 0.2 * 0.3 + 0.3 * 0.4 + 0.2 * 0.4 - 2 * 0.2 * 0.3 * 0.4);
}

TEST(Voting, FixedPointsReference) {
  const auto fp = fixed_points(0.1);
  EXPECT_NEAR(fp.u_plus, 0.989953946493442702, 1e-15);
  EXPECT_NEAR(fp.u_minus, 0.0100460535065572981, 1e-15);
  EXPECT_DOUBLE_EQ(fp.half, 0.5);
  EXPECT_THROW(fixed_points(1.0 / 3.0), std::domain_error);
  EXPECT_THROW(fixed_points(-0.1), std::domain_error);
}

TEST(Voting, FixedPointsAreFixed) {
  for (double b = 0.0; b < 0.33; b += 0.01) {
    const auto fp = fixed_points(b);
    EXPECT_NEAR(g_times(fp.u_plus, b), fp.u_plus, 1e-13);
    EXPECT_NEAR(g_times(fp.u_minus, b), fp.u_minus, 1e-13);
    EXPECT_NEAR(g_times(0.5, b), 0.5, 1e-15);
  }
}

TEST(Voting, SmallBExpansion) {
  for (double b : {1e-2, 1e-3}) {
    const double lead = (fixed_points(b).u_minus - 0.75 * b * b) / (b * b * b);
    EXPECT_NEAR(lead, 2.0, 50 * b);
  }
}

TEST(Voting, SymmetryAndOrdering) {
  for (double p = 0; p <= 1; p += 0.05)
    for (double b = 0; b < 0.34; b += 0.03) {
      EXPECT_NEAR(g_times(1 - p, b), 1 - g_times(p, b), 1e-14);
      EXPECT_NEAR(g_plus(1 - p, b), 1 - g_minus(p, b), 1e-14);
      EXPECT_LE(g_minus(p, b), g_times(p, b) + 1e-15);
      EXPECT_LE(g_times(p, b), g_plus(p, b) + 1e-15);
    }
}

TEST(Voting, MonotoneInEachArgument) {
  for (double p = 0; p < 1; p += 0.1)
    for (double q = 0; q <= 1; q += 0.1)
      EXPECT_LE(g_times(p, q, 0.5, 0.1), g_times(p + 0.1, q, 0.5, 0.1) + 1e-15);
}

TEST(Voting, CubicIdentity) {
  for (double b : {0.0, 0.05, 0.1, 0.2, 0.3})
    for (double p = 0; p <= 1; p += 0.01) EXPECT_LT(std::abs(cubic_identity_residual(p, b)), 1e-13);
}

TEST(Voting, IterateHitIndices) {
  // First n with |g_times^n(1/2 + eps) - u_plus| <= eps^2 for LogExample b at alpha = 1.5.
  const struct {
    int m;
    double b;
    int n;
  } rows[] = {{2, 0.0450296, 16}, {3, 0.0205267, 22}, {4, 0.0116509, 28}};
  for (const auto& r : rows) {
    const double eps = std::pow(10.0, -r.m);
    const double I = eps * std::abs(std::log(eps));
    const double b = eps * eps / (eps * eps + I * I);
    EXPECT_NEAR(b, r.b, 1e-6);
    const auto res = iterate_g_times(0.5 + eps, 200, b, fixed_points(b).u_plus, eps * eps);
    EXPECT_EQ(res.first_hit, r.n) << "m=" << r.m;
  }
}
