#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "fracac/estimator.hpp"
#include "fracac/oracle.hpp"

namespace fracac {

struct OracleSettings {
  int N = 16384;
  double L = 64.0;
  double dt_over_eps2 = 0.01;
  double smooth_cells = 2.0;
};

struct DualityPoint {
  double x = 0, t = 0;
  Estimate mc;
  double oracle = 0;
  double tol_oracle = 0;  // spread of the oracle over its discretization variants
  double diff = 0;
  bool pass = false;
};

// 1D oracle values at (x, t) points for a step initial condition.
inline std::vector<double> oracle_values_1d(const ModelParams& p, const InitialCondition& ic,
                                            const std::vector<std::pair<double, double>>& pts,
                                            const OracleSettings& s) {
  if (ic.kind != InitialCondition::Kind::Step || ic.threshold != 0.0)
    throw std::invalid_argument("oracle_values_1d: step initial condition at 0 required");
  std::set<double> ts;
  for (const auto& [x, t] : pts) ts.insert(t);
  const std::vector<double> times(ts.begin(), ts.end());
  const auto init = smoothed_step_1d(s.N, s.L, ic.low, ic.high, s.smooth_cells);
  const auto snaps = solve(p, init, times, s.dt_over_eps2 * p.epsilon * p.epsilon);
  std::vector<double> out;
  for (const auto& [x, t] : pts) {
    const auto k = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
    out.push_back(t == 0.0 ? ic(Point::scalar(x)) : snaps[k].sample1d(x));
  }
  return out;
}

// Monte Carlo (stable tree, Majority) against the spectral solution. tol_oracle
// is the largest change of the oracle value under halving dt, doubling the
// smoothing width, and doubling the domain at fixed h.
inline std::vector<DualityPoint> duality_compare(const ModelParams& p, const VoteScheme& scheme,
                                                 const std::vector<std::pair<double, double>>& pts, std::int64_t n_mc,
                                                 std::uint64_t seed, const EstimatorOptions& opt = {},
                                                 const OracleSettings& s = {}) {
  for (const auto& [x, t] : pts)
    if (t * p.branch_rate > 8.0) throw std::invalid_argument("duality_compare: t / eps^2 exceeds 8");
  const auto base = oracle_values_1d(p, scheme.initial, pts, s);
  OracleSettings v1 = s, v2 = s, v3 = s;
  v1.dt_over_eps2 /= 2;
  v2.smooth_cells *= 2;
  v3.L *= 2;
  v3.N *= 2;
  const auto a = oracle_values_1d(p, scheme.initial, pts, v1);
  const auto b = oracle_values_1d(p, scheme.initial, pts, v2);
  const auto c = oracle_values_1d(p, scheme.initial, pts, v3);
  std::vector<DualityPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    DualityPoint d;
    d.x = pts[i].first;
    d.t = pts[i].second;
    d.oracle = base[i];
    d.tol_oracle = std::max({std::abs(a[i] - base[i]), std::abs(b[i] - base[i]), std::abs(c[i] - base[i])});
    d.mc = estimate_u(p, Point::scalar(d.x), d.t, MotionSpec::stable(1), scheme, n_mc, seed, opt);
    d.diff = d.mc.p_hat - d.oracle;
    d.pass = std::abs(d.diff) <= 3 * d.mc.std_error + d.tol_oracle;
    out.push_back(d);
  }
  return out;
}

}  // namespace fracac
