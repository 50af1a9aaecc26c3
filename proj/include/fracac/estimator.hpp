#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "fracac/geometry.hpp"
#include "fracac/rng.hpp"
#include "fracac/scheme.hpp"
#include "fracac/stats.hpp"
#include "fracac/tree.hpp"

namespace fracac {

// Runs fn(i) for i in [0, n) on `workers` threads. fn writes only to slot i of
// caller-owned storage, so the result never depends on scheduling.
inline void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  constexpr std::int64_t chunk = 64;
  auto work = [&] {
    for (;;) {
      const std::int64_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      const std::int64_t hi = std::min(n, lo + chunk);
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct Estimate {
  double p_hat = 0;
  std::int64_t n = 0;  // replicates that completed
  double std_error = 0;
  double lo = 0;
  double hi = 1;
  std::uint64_t seed = 0;
  std::int64_t budget_exhausted_count = 0;
  std::int64_t resampled_count = 0;
  std::int64_t ones = 0;

  static Estimate from_counts(std::int64_t ones, std::int64_t n, std::uint64_t seed) {
    Estimate e;
    e.ones = ones;
    e.n = n;
    e.seed = seed;
    e.p_hat = n > 0 ? static_cast<double>(ones) / static_cast<double>(n) : 0.0;
    e.std_error = n > 0 ? std::sqrt(e.p_hat * (1 - e.p_hat) / static_cast<double>(n)) : 0.0;
    std::tie(e.lo, e.hi) = wilson_interval(e.p_hat, n);
    return e;
  }
};

struct EstimatorOptions {
  int workers = 1;
  LazyOptions lazy;
  double max_budget_failure = 1e-3;
  double warn_ratio = 8.0;  // t / eps^2 above which runs are flagged
};

inline constexpr std::int8_t kExceeded = -1;

// One replicate: returns 0/1, or kExceeded. Degenerate Z-normals are resampled.
inline std::int8_t replicate_vote(const Point& x, double t, const MotionEngine& eng,
                                  const VoteScheme& scheme, std::uint64_t seed, const LazyOptions& opt,
                                  std::atomic<std::int64_t>* resampled) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    try {
      SchemeVisitor vis(scheme, eng);
      LazyEvaluator<SchemeVisitor> ev(eng, vis, opt);
      return static_cast<std::int8_t>(ev.run(attempt == 0 ? seed : derive(seed, attempt), t, x));
    } catch (const BudgetExceeded&) {
      return kExceeded;
    } catch (const DegenerateNormal&) {
      if (resampled) ++*resampled;
      if (attempt > 8) throw;
    }
  }
}

inline std::vector<std::int8_t> replicate_outcomes(const ModelParams& p, const Point& x, double t,
                                                   const MotionSpec& motion, const VoteScheme& scheme,
                                                   std::int64_t n, std::uint64_t master_seed,
                                                   const EstimatorOptions& opt, std::int64_t* resampled_out = nullptr) {
  if (!(t >= 0)) throw std::invalid_argument("estimate: t must be >= 0");
  if (n <= 0) throw std::invalid_argument("estimate: n must be positive");
  if (x.dim != motion.dim) throw std::invalid_argument("estimate: point dimension does not match motion");
  const MotionEngine eng(p, motion);
  std::vector<std::int8_t> out(static_cast<std::size_t>(n));
  std::atomic<std::int64_t> resampled{0};
  parallel_for(n, opt.workers, [&](std::int64_t i) {
    out[static_cast<std::size_t>(i)] =
        replicate_vote(x, t, eng, scheme, derive(master_seed, static_cast<std::uint64_t>(i)), opt.lazy, &resampled);
  });
  if (resampled_out) *resampled_out = resampled.load();
  return out;
}

struct BudgetFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_budget(std::int64_t exceeded, std::int64_t n, const EstimatorOptions& opt) {
  if (static_cast<double>(exceeded) > opt.max_budget_failure * static_cast<double>(n))
    throw BudgetFailure(std::to_string(exceeded) + " of " + std::to_string(n) +
                        " replicates exceeded the node budget");
}

inline bool exceeds_feasible_time(const ModelParams& p, double t, const EstimatorOptions& opt) {
  return t * p.branch_rate > opt.warn_ratio;
}

inline Estimate estimate_u(const ModelParams& p, const Point& x, double t, const MotionSpec& motion,
                           const VoteScheme& scheme, std::int64_t n, std::uint64_t master_seed,
                           const EstimatorOptions& opt = {}) {
  std::int64_t resampled = 0;
  const auto out = replicate_outcomes(p, x, t, motion, scheme, n, master_seed, opt, &resampled);
  std::int64_t ones = 0, done = 0, exceeded = 0;
  for (auto v : out) {
    if (v == kExceeded) {
      ++exceeded;
      continue;
    }
    ones += v;
    ++done;
  }
  check_budget(exceeded, n, opt);
  auto e = Estimate::from_counts(ones, done, master_seed);
  e.budget_exhausted_count = exceeded;
  e.resampled_count = resampled;
  return e;
}

// Paired outcomes of two evaluations sharing every per-label stream.
struct CoupledEstimate {
  Estimate first, second;
  std::int64_t n11 = 0, n10 = 0, n01 = 0, n00 = 0;

  std::int64_t n() const { return n11 + n10 + n01 + n00; }

  // Mean and paired standard error of first - (scale * second + shift).
  std::pair<double, double> linear_difference(double scale = 1.0, double shift = 0.0) const {
    const double N = static_cast<double>(n());
    const double vals[4] = {1 - scale - shift, 1 - shift, -scale - shift, -shift};
    const double cnts[4] = {double(n11), double(n10), double(n01), double(n00)};
    double m = 0;
    for (int k = 0; k < 4; ++k) m += cnts[k] * vals[k];
    m /= N;
    double v = 0;
    for (int k = 0; k < 4; ++k) v += cnts[k] * (vals[k] - m) * (vals[k] - m);
    v /= (N - 1);
    return {m, std::sqrt(v / N)};
  }
  double difference() const { return linear_difference().first; }
  double paired_stderr() const { return linear_difference().second; }
};

struct Uncouplable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void check_couplable(const MotionSpec& a, const MotionSpec& b) {
  if (a.dim != b.dim) throw Uncouplable("coupled motions must share a dimension");
  if (a.subordinated() != b.subordinated())
    throw Uncouplable("stable and subordinated motions share only topology; use the full subordinated motion");
  if (a.subordinated() && a.resolution_ratio != b.resolution_ratio)
    throw Uncouplable("coupled subordinated motions must share the small-jump cutoff");
}

// Pairs two outcome vectors drawn under the same master seed.
inline CoupledEstimate pair_outcomes(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b,
                                     std::uint64_t master_seed, const EstimatorOptions& opt = {}) {
  if (a.size() != b.size()) throw Uncouplable("paired outcome vectors differ in length");
  CoupledEstimate c;
  std::int64_t exceeded = 0, ones_a = 0, ones_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == kExceeded || b[i] == kExceeded) {
      ++exceeded;
      continue;
    }
    ones_a += a[i];
    ones_b += b[i];
    if (a[i] && b[i]) ++c.n11;
    else if (a[i]) ++c.n10;
    else if (b[i]) ++c.n01;
    else ++c.n00;
  }
  check_budget(exceeded, static_cast<std::int64_t>(a.size()), opt);
  c.first = Estimate::from_counts(ones_a, c.n(), master_seed);
  c.second = Estimate::from_counts(ones_b, c.n(), master_seed);
  c.first.budget_exhausted_count = c.second.budget_exhausted_count = exceeded;
  return c;
}

inline CoupledEstimate estimate_coupled(const ModelParams& p, const Point& x, double t, const MotionSpec& ma,
                                        const VoteScheme& sa, const MotionSpec& mb, const VoteScheme& sb,
                                        std::int64_t n, std::uint64_t master_seed, const EstimatorOptions& opt = {}) {
  check_couplable(ma, mb);
  return pair_outcomes(replicate_outcomes(p, x, t, ma, sa, n, master_seed, opt),
                       replicate_outcomes(p, x, t, mb, sb, n, master_seed, opt), master_seed, opt);
}

struct ScanResult {
  std::vector<double> x;
  std::vector<Estimate> estimates;
  std::optional<double> crossing;  // level-1/2 location along the axis
  double isotonic_residual = 0;    // max |p_hat - nondecreasing fit|
};

// Estimates along origin + s * direction; every grid point uses the same
// master seed (common random numbers).
inline ScanResult interface_scan(const ModelParams& p, double t, const Point& origin, const Point& direction,
                                 const std::vector<double>& grid, const MotionSpec& motion, const VoteScheme& scheme,
                                 std::int64_t n, std::uint64_t master_seed, const EstimatorOptions& opt = {}) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] < grid[i - 1]) throw std::invalid_argument("interface_scan: grid must be sorted");
  ScanResult r;
  r.x = grid;
  std::vector<double> ph;
  for (double s : grid) {
    r.estimates.push_back(estimate_u(p, origin + direction * s, t, motion, scheme, n, master_seed, opt));
    ph.push_back(r.estimates.back().p_hat);
  }
  const auto fit = isotonic_fit(ph);
  for (std::size_t i = 0; i < ph.size(); ++i) r.isotonic_residual = std::max(r.isotonic_residual, std::abs(ph[i] - fit[i]));
  for (std::size_t i = 1; i < fit.size(); ++i) {
    const double a = fit[i - 1] - 0.5, b = fit[i] - 0.5;
    if (a < 0 && b >= 0) {
      r.crossing = grid[i - 1] + (b == a ? 0.0 : a / (a - b)) * (grid[i] - grid[i - 1]);
      break;
    }
  }
  return r;
}

}  // namespace fracac
