#include <gtest/gtest.h>

#include "fracac/levy.hpp"
#include "fracac/stats.hpp"

using namespace fracac;

namespace {

ModelParams log15() { return ModelParams(1.5, 0.1, ScalingPreset::log_example()); }

std::vector<double> stable_draws(double alpha, double scale, int n, std::uint64_t seed) {
  Stream s(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = scale * standard_symmetric_stable(alpha, s);
  return out;
}

}  // namespace

TEST(Stable, SymmetricAboutZero) {
  auto xs = stable_draws(1.5, 1.0, 20000, 1);
  std::vector<double> neg(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) neg[i] = -xs[i];
  EXPECT_LT(ks_statistic(xs, neg), ks_critical(xs.size(), neg.size(), 0.001));
}

TEST(Stable, SelfSimilarScaling) {
  // X_{2t} has the law of 2^{1/alpha} X_t.
  const ModelParams p = log15();
  Stream a(2), b(3);
  std::vector<double> x2t, xt;
  for (int i = 0; i < 20000; ++i) {
    x2t.push_back(sample_stable_increment(p, 0.02, 1, a)[0]);
    xt.push_back(std::pow(2.0, 1 / 1.5) * sample_stable_increment(p, 0.01, 1, b)[0]);
  }
  EXPECT_LT(ks_statistic(x2t, xt), ks_critical(20000, 20000, 0.001));
}

TEST(Stable, CharacteristicFunction) {
  Stream s(4);
  const int n = 100000;
  for (double xi : {0.5, 1.0, 2.0}) {
    double acc = 0;
    Stream t(4 + static_cast<int>(xi * 10));
    for (int i = 0; i < n; ++i) acc += std::cos(xi * standard_symmetric_stable(1.5, t));
    EXPECT_NEAR(acc / n, std::exp(-std::pow(xi, 1.5)), 5 / std::sqrt(n));
  }
}

TEST(Stable, BrownianVariance) {
  const ModelParams p(2.0, 0.1, ScalingPreset::log_example());
  Stream s(5);
  RunningStats st;
  for (int i = 0; i < 100000; ++i) st.add(sample_stable_increment(p, 0.3, 1, s)[0]);
  EXPECT_NEAR(st.variance(), 2 * p.speed * 0.3, 0.02 * 2 * p.speed * 0.3);
}

TEST(Stable, PlanarProjectionMatchesLine) {
  const ModelParams p = log15();
  Stream a(6), b(7);
  std::vector<double> plane, line;
  for (int i = 0; i < 20000; ++i) {
    plane.push_back(sample_stable_increment(p, 0.01, 2, a)[0]);
    line.push_back(sample_stable_increment(p, 0.01, 1, b)[0]);
  }
  EXPECT_LT(ks_statistic(plane, line), ks_critical(20000, 20000, 0.001));
}

TEST(Subordinator, MeanRateIsOne) {
  const ModelParams p = log15();
  EXPECT_NEAR(TruncatedLaw::with_ratio(p, 1e-4).mean_rate(), 1.0, 1e-12);
  EXPECT_NEAR(TruncatedLaw::with_ratio(ModelParams(1.7, 0.05, ScalingPreset::log_example()), 1e-3).mean_rate(),
              1.0, 1e-12);
}

TEST(Subordinator, MeanGrowsLinearly) {
  const ModelParams p = log15();
  const auto law = TruncatedLaw::with_ratio(p, 1e-4);
  for (double s : {0.01, 0.05}) {
    Stream rng(8);
    RunningStats st;
    for (int i = 0; i < 20000; ++i) st.add(truncated_increment(law, s, rng));
    EXPECT_NEAR(st.mean, s, 4 * st.stderr_mean());
  }
}

TEST(Subordinator, PathInvariants) {
  const ModelParams p = log15();
  Stream rng(9);
  const auto path = sample_truncated_subordinator(p, 0.1, 1e-4 * p.trunc_level, rng);
  double prev = 0;
  for (double t = 0; t <= 0.1; t += 0.001) {
    const double v = path.value_at(t);
    EXPECT_GE(v, prev);
    prev = v;
  }
  for (const auto& [t, y] : path.jumps) {
    EXPECT_GT(y, path.resolution_delta * (1 - 1e-12));
    EXPECT_LE(y, p.trunc_level * (1 + 1e-12));
  }
  Stream big(10);
  const auto full = add_large_jumps(path, p, big);
  for (std::size_t i = 1; i < full.jumps.size(); ++i) EXPECT_LE(full.jumps[i - 1].first, full.jumps[i].first);
  EXPECT_GE(full.value_at(0.1), path.value_at(0.1));
}

TEST(Subordinator, LargeJumpCounts) {
  const ModelParams p = log15();
  const double horizon = p.I_val * p.I_val;  // one arrival expected
  Stream rng(11);
  RunningStats cnt;
  int empty = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto a = large_jump_arrivals(p, horizon, rng);
    cnt.add(static_cast<double>(a.size()));
    empty += a.empty();
    for (int j = 0; j < static_cast<int>(a.size()); ++j) EXPECT_GE(large_jump_size(p, rng), p.trunc_level);
  }
  EXPECT_NEAR(cnt.mean, 1.0, 4 * cnt.stderr_mean());
  EXPECT_NEAR(cnt.variance(), 1.0, 0.05);
  const double pe = std::exp(-1.0);
  EXPECT_NEAR(static_cast<double>(empty) / n, pe, 4 * std::sqrt(pe * (1 - pe) / n));
}

TEST(Laplace, ReferenceValues) {
  // Exact series evaluation at 30 digits for s = 0.05.
  const ModelParams p = log15();
  EXPECT_NEAR(laplace_transform(p, 0.05, 0.5), 0.97533142286950188, 1e-12);
  EXPECT_NEAR(laplace_transform(p, 0.05, 1.0), 0.95131320929331786, 1e-12);
  EXPECT_NEAR(laplace_transform(p, 0.05, 5.0), 0.78049536296872500, 1e-12);
  EXPECT_NEAR(laplace_transform(p, 0.05, -1.0), 1.05136430100363166, 1e-12);
  const double lam = -1.0 / (p.I_val * p.I_val);
  EXPECT_NEAR(laplace_transform(p, 0.05, lam), 2.65528539145344271, 1e-11);
}

TEST(Laplace, TrivialArguments) {
  const ModelParams p = log15();
  EXPECT_EQ(laplace_transform(p, 0.05, 0.0), 1.0);
  EXPECT_EQ(laplace_transform(p, 0.0, 3.0), 1.0);
  const ModelParams bm(2.0, 0.1, ScalingPreset::log_example());
  EXPECT_NEAR(laplace_transform(bm, 0.3, 2.0), std::exp(-0.6), 1e-15);
}

TEST(Laplace, DerivativeAtZeroIsTime) {
  const ModelParams p = log15();
  const double h = 1e-6;
  const double d = (laplace_transform(p, 0.05, -h) - laplace_transform(p, 0.05, h)) / (2 * h);
  EXPECT_NEAR(d, 0.05, 1e-6);
}

TEST(Laplace, MatchesMonteCarlo) {
  const ModelParams p = log15();
  const auto law = TruncatedLaw::with_ratio(p, 1e-4);
  Stream rng(12);
  const int n = 20000;
  std::vector<double> r(n);
  for (auto& x : r) x = truncated_increment(law, 0.05, rng);
  for (double lam : {1.0, 5.0, -1.0}) {
    RunningStats st;
    for (double x : r) st.add(std::exp(-lam * x));
    // The resolution cutoff removes jumps below delta and replaces them by drift;
    // the induced bias is far below the Monte Carlo error.
    EXPECT_NEAR(st.mean, laplace_transform(p, 0.05, lam), 4 * st.stderr_mean());
  }
}

TEST(NegativeMoments, ReferenceValues) {
  const ModelParams p = log15();
  EXPECT_NEAR(neg_moment_bound(p, 0.1, 1.0), 19.1058471432981943, 1e-11);
  EXPECT_NEAR(neg_moment_bound(p, 0.05, 0.5), 7.44703589134334308, 1e-11);
  EXPECT_NEAR(neg_moment_bound(p, 0.05, 1.5), 344.967819440393880, 1e-9);
  EXPECT_THROW(neg_moment_bound(p, 0.0, 1.0), std::invalid_argument);
}

TEST(NegativeMoments, BoundHoldsForSamples) {
  const ModelParams p = log15();
  const auto law = TruncatedLaw::with_ratio(p, 1e-4);
  Stream rng(13);
  RunningStats st;
  for (int i = 0; i < 20000; ++i) st.add(1.0 / truncated_increment(law, 0.05, rng));
  EXPECT_LT(st.mean, neg_moment_bound(p, 0.05, 1.0));
}

TEST(NegativeMoments, DecreasesInTime) {
  const ModelParams p = log15();
  EXPECT_GT(neg_moment_bound(p, 0.01, 1.0), neg_moment_bound(p, 0.02, 1.0));
  EXPECT_GT(neg_moment_bound(p, 0.02, 1.0), neg_moment_bound(p, 0.04, 1.0));
}

TEST(HeatKernel, NormalizedAndLipschitz) {
  double mass = 0;
  const double h = 1e-3;
  for (double x = -20; x <= 20; x += h) mass += heat_kernel(0.7, Point::scalar(0), Point::scalar(x)) * h;
  EXPECT_NEAR(mass, 1.0, 1e-9);
  Stream rng(14);
  for (int i = 0; i < 10000; ++i) {
    const double r = 0.01 + rng.uniform();
    const Point x = Point::xy(rng.normal(), rng.normal()), y = Point::xy(rng.normal(), rng.normal());
    const Point z = Point::xy(rng.normal(), rng.normal());
    const double lhs = std::abs(heat_kernel(r, x, z) - heat_kernel(r, y, z));
    const double lip = std::pow(4 * std::numbers::pi * r, -1.0) * (x - y).norm() / std::sqrt(2 * r) *
                       std::exp(-0.5);
    EXPECT_LE(lhs, lip * (1 + 1e-12));
  }
}

TEST(SubordinatedMotion, Symmetric) {
  const ModelParams p = log15();
  std::vector<double> xs, neg;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const double x = sample_subordinated_bm(p, {0.02}, 1, false, derive(15, k)).positions[0][0];
    xs.push_back(x);
    neg.push_back(-x);
  }
  EXPECT_LT(ks_statistic(xs, neg), ks_critical(20000, 20000, 0.001));
}

TEST(SubordinatedMotion, FullMatchesStable) {
  const ModelParams p = log15();
  Stream rng(16);
  std::vector<double> sub, st;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    sub.push_back(sample_subordinated_bm(p, {0.02}, 1, false, derive(16, k)).positions[0][0]);
    st.push_back(sample_stable_increment(p, 0.02, 1, rng)[0]);
  }
  EXPECT_LT(ks_statistic(sub, st), ks_critical(20000, 20000, 0.001));
}

TEST(SubordinatedMotion, TruncatedVarianceIsTwiceTime) {
  const ModelParams p = log15();
  RunningStats st;
  for (std::uint64_t k = 0; k < 40000; ++k)
    st.add(sample_subordinated_bm(p, {0.03}, 1, true, derive(17, k)).positions[0][0]);
  EXPECT_NEAR(st.variance(), 0.06, 0.06 * 0.04);
}

TEST(SubordinatedMotion, CoupledPathsShareSmallJumps) {
  const ModelParams p = log15();
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto tr = sample_subordinated_bm(p, {0.01, 0.02}, 2, true, derive(18, k));
    const auto fu = sample_subordinated_bm(p, {0.01, 0.02}, 2, false, derive(18, k));
    ASSERT_EQ(tr.path.jumps, fu.path.jumps);
    if (fu.full_path.jumps.size() == fu.path.jumps.size()) EXPECT_EQ(tr.positions, fu.positions);
  }
}

TEST(Stable, PositiveStableLaplace) {
  const int n = 100000;
  for (double lam : {0.5, 1.0, 3.0}) {
    RunningStats st;
    Stream r(19 + static_cast<int>(lam * 10));
    for (int i = 0; i < n; ++i) st.add(std::exp(-lam * positive_stable(0.75, r)));
    EXPECT_NEAR(st.mean, std::exp(-std::pow(lam, 0.75)), 4 * st.stderr_mean());
  }
}
