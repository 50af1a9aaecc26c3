#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "fracac/params.hpp"
#include "fracac/point.hpp"
#include "fracac/rng.hpp"

namespace fracac {

inline constexpr double kDefaultResolutionRatio = 1e-4;

// Chambers-Mallows-Stuck, symmetric case: characteristic function exp(-|xi|^alpha).
inline double standard_symmetric_stable(double alpha, Stream& rng) {
  const double V = std::numbers::pi * (rng.uniform() - 0.5);
  const double W = rng.exponential(1.0);
  if (alpha == 1.0) return std::tan(V);
  return std::sin(alpha * V) / std::pow(std::cos(V), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * V) / W, (1.0 - alpha) / alpha);
}

// Kanter's representation: Laplace transform exp(-lambda^a), 0 < a < 1.
inline double positive_stable(double a, Stream& rng) {
  const double U = std::numbers::pi * rng.uniform();
  const double W = rng.exponential(1.0);
  return std::sin(a * U) / std::pow(std::sin(U), 1.0 / a) *
         std::pow(std::sin((1.0 - a) * U) / W, (1.0 - a) / a);
}

// Increment over dt of the isotropic process with generator -speed (-Laplacian)^{alpha/2}.
inline Point sample_stable_increment(const ModelParams& p, double dt, int dim, Stream& rng) {
  if (!(dt > 0)) throw std::invalid_argument("sample_stable_increment: dt must be positive");
  Point out(dim);
  if (p.brownian()) {
    const double s = std::sqrt(2.0 * p.speed * dt);
    for (int i = 0; i < dim; ++i) out[i] = s * rng.normal();
    return out;
  }
  const double scale = std::pow(p.speed * dt, 1.0 / p.alpha);
  if (dim == 1) {
    out[0] = scale * standard_symmetric_stable(p.alpha, rng);
    return out;
  }
  const double A = positive_stable(p.alpha / 2, rng);
  const double s = scale * std::sqrt(2.0 * A);
  for (int i = 0; i < dim; ++i) out[i] = s * rng.normal();
  return out;
}

// Levy density c y^{-1-a} on (0, M], a = alpha/2, split at delta into a
// compound Poisson part and a compensating drift.
struct TruncatedLaw {
  double a = 0;
  double c = 0;
  double M = 0;
  double delta = 0;
  double drift = 0;
  double jump_rate = 0;

  TruncatedLaw() = default;
  TruncatedLaw(const ModelParams& p, double resolution_delta) {
    if (p.brownian()) {
      drift = 1.0;
      return;
    }
    a = p.alpha / 2;
    M = p.trunc_level;
    if (!(resolution_delta > 0 && resolution_delta < M))
      throw std::invalid_argument("resolution_delta must lie in (0, trunc_level)");
    delta = resolution_delta;
    const double K = (2 - p.alpha) / p.alpha;
    c = a * std::pow(K, a) * std::pow(p.I_val, p.alpha - 2);
    drift = c * std::pow(delta, 1 - a) / (1 - a);
    jump_rate = c * (std::pow(delta, -a) - std::pow(M, -a)) / a;
    dma_ = std::pow(delta, -a);
    span_ = dma_ - std::pow(M, -a);
  }

  static TruncatedLaw with_ratio(const ModelParams& p, double ratio) {
    return p.brownian() ? TruncatedLaw(p, 0.0) : TruncatedLaw(p, ratio * p.trunc_level);
  }

  double jump_size(double u) const { return std::pow(dma_ - u * span_, -1.0 / a); }

  // Integral of y over the Levy measure on (0, M]; equals 1 under the normalization.
  double mean_rate() const { return a == 0 ? drift : c * std::pow(M, 1 - a) / (1 - a); }

 private:
  double dma_ = 0;
  double span_ = 0;
};

// Increment of the truncated subordinator over dt.
inline double truncated_increment(const TruncatedLaw& law, double dt, Stream& rng) {
  double r = law.drift * dt;
  if (law.jump_rate <= 0) return r;
  double clock = rng.exponential(law.jump_rate);
  while (clock < dt) {
    r += law.jump_size(rng.uniform());
    clock += rng.exponential(law.jump_rate);
  }
  return r;
}

// Jumps of the untruncated subordinator above trunc_level: sizes M U^{-2/alpha}.
inline double large_jump_size(const ModelParams& p, Stream& rng) {
  return p.trunc_level * std::pow(rng.uniform(), -2.0 / p.alpha);
}

inline std::vector<double> large_jump_arrivals(const ModelParams& p, double horizon, Stream& rng) {
  std::vector<double> out;
  if (p.brownian() || !(horizon > 0)) return out;
  const double rate = p.large_jump_rate();
  for (double t = rng.exponential(rate); t < horizon; t += rng.exponential(rate)) out.push_back(t);
  return out;
}

struct SubordinatorPath {
  double horizon = 0;
  double resolution_delta = 0;
  double drift_rate = 0;
  std::vector<std::pair<double, double>> jumps;  // (time, size), time-ordered

  double value_at(double t) const {
    double v = drift_rate * t;
    for (const auto& [s, y] : jumps) {
      if (s > t) break;
      v += y;
    }
    return v;
  }
};

inline SubordinatorPath sample_truncated_subordinator(const ModelParams& p, double horizon,
                                                      double resolution_delta, Stream& rng) {
  const TruncatedLaw law(p, resolution_delta);
  SubordinatorPath path{horizon, resolution_delta, law.drift, {}};
  if (law.jump_rate <= 0) return path;
  for (double t = rng.exponential(law.jump_rate); t < horizon; t += rng.exponential(law.jump_rate))
    path.jumps.emplace_back(t, law.jump_size(rng.uniform()));
  return path;
}

// Truncated path plus the large jumps of the full subordinator.
inline SubordinatorPath add_large_jumps(SubordinatorPath path, const ModelParams& p, Stream& rng) {
  for (double t : large_jump_arrivals(p, path.horizon, rng)) path.jumps.emplace_back(t, large_jump_size(p, rng));
  std::stable_sort(path.jumps.begin(), path.jumps.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  return path;
}

// E exp(-lambda R_s) for the truncated subordinator.
inline double laplace_transform(const ModelParams& p, double s, double lambda) {
  if (p.brownian()) return std::exp(-lambda * s);
  if (lambda == 0.0 || s == 0.0) return 1.0;
  const double a = p.alpha / 2, K = (2 - p.alpha) / p.alpha, I = p.I_val, M = p.trunc_level;
  if (lambda > 0) {
    const double boundary = -std::expm1(-lambda * M) / (I * I);
    const double bulk = std::pow(K, a) * std::pow(I, p.alpha - 2) * std::pow(lambda, a) *
                        boost::math::tgamma_lower(1 - a, lambda * M);
    return std::exp(s * (boundary - bulk));
  }
  // Power series of the exponent; the terms are positive.
  const double c = a * std::pow(K, a) * std::pow(I, p.alpha - 2);
  const double x = -lambda * M;
  double term = 1.0, sum = 0.0;
  for (int n = 1; n < 1000; ++n) {
    term *= x / n;
    const double add = term / (n - a);
    sum += add;
    if (n > x && add < 1e-17 * sum) break;
  }
  return std::exp(s * c * std::pow(M, -a) * sum);
}

// Explicit upper bound on E[R_s^{-q}].
inline double neg_moment_bound(const ModelParams& p, double s, double q) {
  if (!(q > 0 && s > 0)) throw std::invalid_argument("neg_moment_bound: need q > 0, s > 0");
  const double a = p.alpha, K = (2 - a) / a, e = 2 * q / a;
  return std::exp(K * s) / (q * boost::math::tgamma(q)) *
         (1 + e * std::pow(a / (2 * s), e) * boost::math::tgamma(e));
}

inline double heat_kernel(double r, const Point& x, const Point& y) {
  const double d2 = (x - y).dot(x - y);
  return std::pow(4 * std::numbers::pi * r, -x.dim / 2.0) * std::exp(-d2 / (4 * r));
}

struct SubordinatedSample {
  std::vector<Point> positions;
  SubordinatorPath path;       // truncated part
  SubordinatorPath full_path;  // truncated part plus large jumps (equal to path when truncated)
};

// W(R_t) at the requested times. Brownian increments over truncated-subordinator
// time and over large-jump time come from separate streams, so the truncated
// sample is the full one with the large-jump contributions removed.
inline SubordinatedSample sample_subordinated_bm(const ModelParams& p, const std::vector<double>& times,
                                                 int dim, bool truncated, std::uint64_t key,
                                                 double resolution_ratio = kDefaultResolutionRatio) {
  SubordinatedSample out;
  const double horizon = times.empty() ? 0.0 : times.back();
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1] || times[0] < 0) throw std::invalid_argument("times must be sorted and >= 0");
  Stream small(key, Purpose::SmallJumps), bm(key, Purpose::Motion);
  Stream large(key, Purpose::LargeJumps), large_bm(key, Purpose::LargeJumpMotion);
  if (p.brownian()) {
    out.path = SubordinatorPath{horizon, 0.0, 1.0, {}};
  } else {
    out.path = sample_truncated_subordinator(p, horizon, resolution_ratio * p.trunc_level, small);
  }
  out.full_path = truncated || p.brownian() ? out.path : add_large_jumps(out.path, p, large);

  Point pos(dim);
  double prev_small = 0, prev_large = 0;
  for (double t : times) {
    const double r_small = out.path.value_at(t);
    const double r_large = out.full_path.value_at(t) - r_small;
    const double ds = std::sqrt(2 * (r_small - prev_small));
    for (int i = 0; i < dim; ++i) pos[i] += ds * bm.normal();
    if (!truncated && r_large > prev_large) {
      const double dl = std::sqrt(2 * (r_large - prev_large));
      for (int i = 0; i < dim; ++i) pos[i] += dl * large_bm.normal();
    }
    prev_small = r_small;
    prev_large = r_large;
    out.positions.push_back(pos);
  }
  return out;
}

}  // namespace fracac
