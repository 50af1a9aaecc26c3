#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace fracac {

inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Probability that the majority of three independent votes is 1.
inline double g(double p1, double p2, double p3) {
  p1 = clamp01(p1);
  p2 = clamp01(p2);
  p3 = clamp01(p3);
  return p1 * p2 * p3 + p1 * p2 * (1 - p3) + p2 * p3 * (1 - p1) + p3 * p1 * (1 - p2);
}
inline double g(double q) { return g(q, q, q); }

// Children marked w.p. b vote 1/2, 1 or 0 respectively.
inline double g_times(double p1, double p2, double p3, double b) {
  auto m = [b](double p) { return (1 - b) * clamp01(p) + b / 2; };
  return g(m(p1), m(p2), m(p3));
}
inline double g_times(double q, double b) { return g_times(q, q, q, b); }

inline double g_plus(double p1, double p2, double p3, double b) {
  auto m = [b](double p) { return (1 - b) * clamp01(p) + b; };
  return g(m(p1), m(p2), m(p3));
}
inline double g_plus(double q, double b) { return g_plus(q, q, q, b); }

inline double g_minus(double p1, double p2, double p3, double b) {
  auto m = [b](double p) { return (1 - b) * clamp01(p); };
  return g(m(p1), m(p2), m(p3));
}
inline double g_minus(double q, double b) { return g_minus(q, q, q, b); }

struct FixedPoints {
  double u_minus;
  double half;
  double u_plus;
};

inline FixedPoints fixed_points(double b) {
  if (!(b >= 0.0 && b < 1.0 / 3.0))
    throw std::domain_error("fixed_points: need 0 <= b < 1/3");
  const double c = (1 - b) * (1 - b) * (1 - b);
  const double w = std::sqrt(c * (1 - 3 * b)) / (2 * c);
  return {0.5 - w, 0.5, 0.5 + w};
}

struct IterateResult {
  double value;
  int first_hit;  // first n with |iterate - target| <= tol, -1 if never
};

inline IterateResult iterate_g_times(double q0, int n, double b, double target = NAN, double tol = 0.0) {
  double q = q0;
  int hit = (!std::isnan(target) && std::abs(q - target) <= tol) ? 0 : -1;
  for (int i = 1; i <= n; ++i) {
    q = g_times(q, b);
    if (hit < 0 && !std::isnan(target) && std::abs(q - target) <= tol) hit = i;
  }
  return {q, hit};
}

// g_times(p) - p minus its factorization through the three fixed points.
inline double cubic_identity_residual(double p, double b) {
  const auto fp = fixed_points(b);
  const double c = (1 - b) * (1 - b) * (1 - b);
  return g_times(p, b) - p - 2 * c * (p - fp.u_minus) * (p - 0.5) * (fp.u_plus - p);
}

}  // namespace fracac
