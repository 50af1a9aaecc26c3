#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fracac/estimator.hpp"
#include "fracac/geometry.hpp"
#include "fracac/levy.hpp"
#include "fracac/rng.hpp"

namespace fracac {

// Explicit sphere constants on the time window [0, T].
struct SphereConstants {
  double V0;  // bound on the normal speed
  double c0;  // half the smallest radius
  double C0;  // bound on |Laplacian d| - |d_t| mismatch per unit distance inside the band
  double D0;  // V0 + C0 c0

  static SphereConstants of(const SphereFlow& flow, double T, double beta) {
    const double r = flow.radius(T);
    SphereConstants c{};
    c.V0 = flow.V0(T);
    c.c0 = flow.c0(T);
    c.C0 = (flow.dim - 1) / ((r - beta) * r);
    c.D0 = c.V0 + c.C0 * c.c0;
    return c;
  }
};

struct CouplingConfig {
  SphereFlow flow;
  Point x0 = Point::xy(1.0, 0.0);
  double t = 0.25;
  int k = 1;
  double beta = 0.1;
  double C0 = 0;     // <= 0 selects the sphere constant
  double l = 0;      // <= 0 selects D0 (k + 2)
  std::vector<double> s_grid;
  int substeps = 400;  // Brownian grid resolution over the largest subordinator value
  double resolution_ratio = kDefaultResolutionRatio;
};

struct CouplingReport {
  std::int64_t n = 0;
  std::int64_t violations_plus = 0;   // d(Z+) < B(R) - C0 beta s for some grid s before band exit
  std::int64_t violations_minus = 0;  // d(Z-) > B(R) + C0 beta s
  std::int64_t band_exits = 0;        // replicates leaving the band before the last grid time
                                      // (grid times after the exit are not checked)
  std::int64_t deviation_events = 0;  // |R_s - s| > (k+2) I^2 |log eps| at some grid s
  double C0 = 0;
  double l = 0;
  double fitted_C0 = 0;  // smallest C0 giving a violation rate <= eps^{k+1}
  double level = 0;      // eps^{k+1}

  double rate_plus() const { return double(violations_plus) / double(n); }
  double rate_minus() const { return double(violations_minus) / double(n); }
  double deviation_rate() const { return double(deviation_events) / double(n); }
  static double se(double rate, std::int64_t n) { return std::sqrt(std::max(rate * (1 - rate), 1.0 / n) / n); }
};

// Compares the signed distance of Z+/Z- with a 1D Brownian motion built from
// the radial component of the planar Brownian increments (both time-changed by
// the same truncated subordinator).
inline CouplingReport coupling_check(const ModelParams& p, const CouplingConfig& cfg, std::int64_t n,
                                     std::uint64_t seed, int workers = 1) {
  if (cfg.flow.dim != 2 || cfg.x0.dim != 2) throw std::invalid_argument("coupling_check: dim must be 2");
  if (cfg.s_grid.empty()) throw std::invalid_argument("coupling_check: empty s grid");
  if (cfg.beta > cfg.flow.radius(cfg.t) / 2) throw std::invalid_argument("coupling_check: beta must be <= r(t)/2");
  const auto sc = SphereConstants::of(cfg.flow, cfg.t, cfg.beta);
  CouplingReport rep;
  rep.n = n;
  rep.C0 = cfg.C0 > 0 ? cfg.C0 : sc.C0;
  rep.l = cfg.l > 0 ? cfg.l : sc.D0 * (cfg.k + 2);
  rep.level = std::pow(p.epsilon, cfg.k + 1);
  const double unit = p.I_val * p.I_val * p.log_eps();
  if (rep.l * unit + cfg.beta >= cfg.flow.radius(cfg.t))
    throw std::invalid_argument("coupling_check: shift + beta must stay below r(t) so Z- does not cross the centre");
  const double dev_bound = (cfg.k + 2) * unit;
  const double s_max = *std::max_element(cfg.s_grid.begin(), cfg.s_grid.end());
  std::vector<double> grid = cfg.s_grid;
  std::sort(grid.begin(), grid.end());

  struct Out {
    std::int8_t plus = 0, minus = 0, exit = 0, dev = 0;
    double need = 0;  // smallest C0 avoiding both violations on this replicate
  };
  std::vector<Out> out(static_cast<std::size_t>(n));
  parallel_for(n, workers, [&](std::int64_t i) {
    const std::uint64_t key = derive(seed, static_cast<std::uint64_t>(i));
    Stream small(key, Purpose::SmallJumps), bm(key, Purpose::Motion);
    const auto path = p.brownian() ? SubordinatorPath{s_max, 0, 1, {}}
                                   : sample_truncated_subordinator(p, s_max, cfg.resolution_ratio * p.trunc_level, small);
    std::vector<double> targets;
    for (double s : grid) targets.push_back(path.value_at(s));
    const double u_max = targets.back();
    const double du = u_max > 0 ? u_max / cfg.substeps : 1.0;

    Out o;
    Point W = cfg.x0;
    double B = signed_distance(cfg.x0, cfg.t, cfg.flow);
    double u = 0;
    bool in_band = true;
    std::size_t next = 0;
    auto band_ok = [&](double uu) {
      return cfg.t - uu > 0 && std::abs(signed_distance(W, std::max(cfg.t - uu, 0.0), cfg.flow)) <= cfg.beta;
    };
    while (next < grid.size()) {
      const double target = std::min(targets[next], u + du);
      const double h = target - u;
      if (h > 0) {
        const double sd = std::sqrt(2 * h);
        Point dW(2);
        dW[0] = sd * bm.normal();
        dW[1] = sd * bm.normal();
        B += outward_normal(W).dot(dW);
        W += dW;
        u = target;
        if (!band_ok(u)) in_band = false;
      }
      if (!in_band) {
        o.exit = 1;
        break;
      }
      while (next < grid.size() && targets[next] <= u) {
        const double s = grid[next];
        if (std::abs(targets[next] - s) > dev_bound) o.dev = 1;
        const double flow_t = cfg.t - s;
        if (std::abs(signed_distance(W, flow_t, cfg.flow)) > cfg.beta) {
          in_band = false;
          break;
        }
        const double dp = signed_distance(z_shift(W, flow_t, cfg.flow, p, rep.l, cfg.beta, +1), flow_t, cfg.flow);
        const double dm = signed_distance(z_shift(W, flow_t, cfg.flow, p, rep.l, cfg.beta, -1), flow_t, cfg.flow);
        if (dp < B - rep.C0 * cfg.beta * s) o.plus = 1;
        if (dm > B + rep.C0 * cfg.beta * s) o.minus = 1;
        if (s > 0) o.need = std::max({o.need, (B - dp) / (cfg.beta * s), (dm - B) / (cfg.beta * s)});
        ++next;
      }
      if (!in_band) {
        o.exit = 1;
        break;
      }
    }
    out[static_cast<std::size_t>(i)] = o;
  });

  std::vector<double> needs;
  for (const auto& o : out) {
    rep.violations_plus += o.plus;
    rep.violations_minus += o.minus;
    rep.band_exits += o.exit;
    rep.deviation_events += o.dev;
    needs.push_back(o.need);
  }
  std::sort(needs.begin(), needs.end());
  const auto allowed = static_cast<std::size_t>(std::floor(rep.level * static_cast<double>(n)));
  rep.fitted_C0 = std::max(0.0, needs[needs.size() - 1 - std::min(allowed, needs.size() - 1)]);
  return rep;
}

struct GronwallGap {
  CoupledEstimate pair;  // first: Z motion, second: plain subordinated motion
  double gap = 0;
  double se = 0;
  double F = 0;
};

// Paired gap between the Marked vote driven by Z (sign) and by the unshifted
// truncated subordinated motion.
inline GronwallGap gronwall_gap(const ModelParams& p, const SphereFlow& flow, const Point& x, double t, double l,
                                double beta, int sign, const InitialCondition& initial, std::int64_t n,
                                std::uint64_t seed, const EstimatorOptions& opt = {},
                                double resolution_ratio = kDefaultResolutionRatio) {
  if (l * p.I_val * p.I_val * p.log_eps() + beta >= flow.r0)
    throw std::invalid_argument("gronwall_gap: shift + beta must stay below r0");
  const VoteScheme scheme{SchemeKind::Marked, initial};
  const auto mz = MotionSpec::z(sign, flow, l, beta, resolution_ratio);
  const auto mw = MotionSpec::truncated(flow.dim, resolution_ratio);
  GronwallGap g;
  g.pair = estimate_coupled(p, x, t, mz, scheme, mw, scheme, n, seed, opt);
  const auto [d, se] = g.pair.linear_difference();
  g.gap = std::abs(d);
  g.se = se;
  g.F = F_eps(p);
  return g;
}

}  // namespace fracac
