#include <gtest/gtest.h>

#include "fracac/config.hpp"
#include "fracac/stats.hpp"

using namespace fracac;

TEST(Config, ParseAndRender) {
  const auto c = RunConfig::parse("# comment\nalpha = 1.5\n\n eps=0.1  # trailing\nlist = 1, 2,3\n");
  EXPECT_EQ(c.real("alpha"), 1.5);
  EXPECT_EQ(c.real("eps"), 0.1);
  EXPECT_EQ(c.reals("list"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(RunConfig::parse(c.render()), c);
  EXPECT_EQ(c.integer("n", 7), 7);
  EXPECT_THROW(c.str("missing"), std::invalid_argument);
  EXPECT_THROW(RunConfig::parse("no equals sign"), std::invalid_argument);
  EXPECT_THROW(RunConfig::parse(" = 3"), std::invalid_argument);
}

TEST(Config, RealsRoundTripExactly) {
  RunConfig c;
  const std::vector<double> xs{0.1, 1.0 / 3.0, 2.302585092994046, -1e-300};
  c.set("xs", RunConfig::join(xs));
  c.set("y", 0.1 + 0.2);
  EXPECT_EQ(c.reals("xs"), xs);
  EXPECT_EQ(c.real("y"), 0.1 + 0.2);
}

TEST(Config, HashIgnoresWorkers) {
  RunConfig a{{"alpha", "1.5"}, {"seed", "3"}}, b = a;
  b.set("workers", "8");
  b.set("out", "/tmp/x");
  EXPECT_EQ(a.hash(), b.hash());
  b.set("seed", "4");
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, DefaultsDoNotOverride) {
  RunConfig c{{"n", "5"}};
  c.set_default("n", "9");
  c.set_default("m", "2");
  EXPECT_EQ(c.integer("n"), 5);
  EXPECT_EQ(c.integer("m"), 2);
}

TEST(Stats, IsotonicFit) {
  const auto f = isotonic_fit({1, 3, 2, 4});
  EXPECT_EQ(f, (std::vector<double>{1, 2.5, 2.5, 4}));
  const auto w = isotonic_fit({3, 1}, {3, 1});
  EXPECT_DOUBLE_EQ(w[0], 2.5);
  EXPECT_DOUBLE_EQ(w[1], 2.5);
  const std::vector<double> mono{0, 1, 1, 2};
  EXPECT_EQ(isotonic_fit(mono), mono);
}

TEST(Stats, KolmogorovSmirnov) {
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2}, {3, 4}), 1.0);
  EXPECT_NEAR(ks_critical(100, 100, 0.05), 1.358 * std::sqrt(2.0 / 100), 2e-3);
}

TEST(Stats, LinearFitAndRunningStats) {
  const auto [a, b] = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(a, 1.0, 1e-14);
  EXPECT_NEAR(b, 2.0, 1e-14);
  RunningStats st;
  for (double x : {1.0, 2.0, 3.0, 4.0}) st.add(x);
  EXPECT_DOUBLE_EQ(st.mean, 2.5);
  EXPECT_NEAR(st.variance(), 5.0 / 3.0, 1e-14);
}
