#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracac/field.hpp"
#include "fracac/params.hpp"
#include "fracac/point.hpp"

namespace fracac {

struct FlowExtinct : std::domain_error {
  using std::domain_error::domain_error;
};

// Sphere shrinking under d_t = Laplacian(d): r(t)^2 = r0^2 - 2(dim-1)t.
struct SphereFlow {
  double r0 = 1.0;
  int dim = 2;

  SphereFlow() = default;
  SphereFlow(double radius, int d) : r0(radius), dim(d) {
    if (!(radius > 0) || d < 2) throw std::invalid_argument("SphereFlow: need r0 > 0, dim >= 2");
  }

  double extinction_time() const { return r0 * r0 / (2.0 * (dim - 1)); }
  double radius(double t) const {
    if (!(t < extinction_time())) throw FlowExtinct("sphere flow extinct at requested time");
    return std::sqrt(r0 * r0 - 2.0 * (dim - 1) * t);
  }
  // Normal speed bound and tubular-neighbourhood radius up to time T.
  double V0(double T) const { return (dim - 1) / radius(T); }
  double c0(double T) const { return radius(T) / 2; }
};

inline double signed_distance(const Point& x, double t, const SphereFlow& flow) {
  return x.norm() - flow.radius(t);
}

struct DegenerateNormal : std::domain_error {
  using std::domain_error::domain_error;
};

inline Point outward_normal(const Point& x) {
  const double r = x.norm();
  if (r == 0.0) throw DegenerateNormal("normal undefined at the origin");
  return x * (1.0 / r);
}

// Shift by sign * l * I^2 |log eps| along the outward normal inside the beta band.
inline Point z_shift(const Point& pos, double t_remaining, const SphereFlow& flow, const ModelParams& p,
                     double l, double beta, int sign) {
  if (pos.dim < 2) throw std::invalid_argument("z_shift: dim must be >= 2");
  if (std::abs(signed_distance(pos, t_remaining, flow)) > beta) return pos;
  const double shift = sign * l * p.I_val * p.I_val * p.log_eps();
  return pos + outward_normal(pos) * shift;
}

struct RadialProfile {
  std::vector<double> radius;
  std::vector<double> mean;
};

// Angular average in shells of width h, restricted to |x| < L.
inline RadialProfile radial_profile(const GridField& f) {
  if (f.dim != 2) throw std::invalid_argument("radial_profile: need a 2D field");
  const double h = f.h();
  const int bins = static_cast<int>(f.L / h);
  std::vector<double> sum(bins, 0.0), rsum(bins, 0.0);
  std::vector<int> cnt(bins, 0);
  for (int i = 0; i < f.N; ++i)
    for (int j = 0; j < f.N; ++j) {
      const double x = f.coord(i), y = f.coord(j), r = std::hypot(x, y);
      const int b = static_cast<int>(r / h);
      if (b >= bins) continue;
      sum[b] += f.at(i, j);
      rsum[b] += r;
      ++cnt[b];
    }
  RadialProfile prof;
  for (int b = 0; b < bins; ++b) {
    if (cnt[b] == 0) continue;
    prof.radius.push_back(rsum[b] / cnt[b]);
    prof.mean.push_back(sum[b] / cnt[b]);
  }
  return prof;
}

struct NoCrossing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Radius at which the angular average first crosses level, scanning outward.
inline double level_set_radius(const GridField& f, double level = 0.5) {
  const auto prof = radial_profile(f);
  for (std::size_t b = 1; b < prof.mean.size(); ++b) {
    const double a = prof.mean[b - 1] - level, c = prof.mean[b] - level;
    if (a == 0.0) return prof.radius[b - 1];
    if ((a < 0) != (c < 0)) {
      const double w = a / (a - c);
      return prof.radius[b - 1] + w * (prof.radius[b] - prof.radius[b - 1]);
    }
  }
  throw NoCrossing("no level crossing in radial profile");
}

}  // namespace fracac
