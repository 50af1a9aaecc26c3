#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "fracac/field.hpp"
#include "fracac/params.hpp"

namespace fracac {

struct CflViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double wavenumber(int j, int N, double L) {
  const int m = j <= N / 2 ? j : j - N;
  return std::numbers::pi * m / L;
}

// Fourier symbol of the linear part: -speed |k|^alpha.
inline double fractional_multiplier(const ModelParams& p, double k_abs) {
  if (k_abs == 0.0) return 0.0;
  return -p.speed * std::pow(k_abs, p.alpha);
}

inline double reaction(const ModelParams& p, double u) { return p.branch_rate * u * (1 - u) * (2 * u - 1); }

struct OracleStats {
  double max_overshoot = 0;  // largest excursion outside [0,1] before clipping
  long steps = 0;
};

// Periodic pseudo-spectral integrator on [-L, L)^dim. Strang splitting:
// half reaction step (Heun), exact exponential step for the fractional part,
// half reaction step, clip to [0,1].
class SpectralSolver {
 public:
  SpectralSolver(const ModelParams& p, int dim, int N, double L) : p_(p), dim_(dim), N_(N), L_(L) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("SpectralSolver: dim must be 1 or 2");
    const int nc = N / 2 + 1;
    real_n_ = dim == 1 ? N : static_cast<std::size_t>(N) * N;
    cplx_n_ = dim == 1 ? nc : static_cast<std::size_t>(N) * nc;
    buf_ = fftw_alloc_real(real_n_);
    spec_ = fftw_alloc_complex(cplx_n_);
    if (dim == 1) {
      fwd_ = fftw_plan_dft_r2c_1d(N, buf_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_1d(N, spec_, buf_, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_r2c_2d(N, N, buf_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(N, N, spec_, buf_, FFTW_ESTIMATE);
    }
    symbol_.resize(cplx_n_);
    for (std::size_t idx = 0; idx < cplx_n_; ++idx) {
      double k2;
      if (dim == 1) {
        const double k = wavenumber(static_cast<int>(idx), N, L);
        k2 = k * k;
      } else {
        const int i = static_cast<int>(idx / nc), j = static_cast<int>(idx % nc);
        const double ki = wavenumber(i, N, L), kj = wavenumber(j, N, L);
        k2 = ki * ki + kj * kj;
      }
      symbol_[idx] = fractional_multiplier(p, std::sqrt(k2));
    }
  }
  ~SpectralSolver() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
    fftw_free(spec_);
  }
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  const OracleStats& stats() const { return stats_; }

  // Applies exp(symbol * dt) in Fourier space, without reaction or clipping.
  void linear_step(GridField& f, double dt) {
    check(f);
    std::copy(f.values.begin(), f.values.end(), buf_);
    fftw_execute(fwd_);
    const double norm = 1.0 / static_cast<double>(real_n_);
    for (std::size_t i = 0; i < cplx_n_; ++i) {
      const double m = std::exp(symbol_[i] * dt) * norm;
      spec_[i][0] *= m;
      spec_[i][1] *= m;
    }
    fftw_execute(bwd_);
    std::copy(buf_, buf_ + real_n_, f.values.begin());
    f.time += dt;
  }

  void step(GridField& f, double dt) {
    react(f, dt / 2);
    linear_step(f, dt);
    react(f, dt / 2);
    for (double& u : f.values) {
      if (std::isnan(u)) throw NumericalBlowup("NaN in oracle field");
      stats_.max_overshoot = std::max(stats_.max_overshoot, std::max(-u, u - 1.0));
      u = std::clamp(u, 0.0, 1.0);
    }
    ++stats_.steps;
  }

  // Advances to time f.time + T with the largest uniform step <= dt.
  void advance(GridField& f, double T, double dt) {
    if (!(T >= 0)) throw std::invalid_argument("advance: negative duration");
    if (T == 0) return;
    const long n = static_cast<long>(std::ceil(T / dt - 1e-12));
    const double h = T / static_cast<double>(n);
    const double t_end = f.time + T;
    for (long i = 0; i < n; ++i) step(f, h);
    f.time = t_end;
  }

 private:
  void check(const GridField& f) const {
    if (f.dim != dim_ || f.N != N_ || f.L != L_) throw std::invalid_argument("SpectralSolver: grid mismatch");
  }
  void react(GridField& f, double h) const {
    for (double& u : f.values) {
      const double k1 = reaction(p_, u);
      const double k2 = reaction(p_, u + h * k1);
      u += 0.5 * h * (k1 + k2);
    }
  }

  ModelParams p_;
  int dim_, N_;
  double L_;
  std::size_t real_n_ = 0, cplx_n_ = 0;
  double* buf_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_{}, bwd_{};
  std::vector<double> symbol_;
  OracleStats stats_;
};

inline void check_cfl(const ModelParams& p, double dt) {
  if (!(dt > 0) || dt > 0.1 * p.epsilon * p.epsilon * (1 + 1e-12))
    throw CflViolation("oracle time step must satisfy 0 < dt <= 0.1 eps^2");
}

// Returns the field at each requested time (sorted, >= initial.time).
inline std::vector<GridField> solve(const ModelParams& p, const GridField& initial, const std::vector<double>& times,
                                    double dt, OracleStats* stats = nullptr) {
  check_cfl(p, dt);
  SpectralSolver solver(p, initial.dim, initial.N, initial.L);
  GridField f = initial;
  std::vector<GridField> out;
  for (double t : times) {
    if (t < f.time) throw std::invalid_argument("solve: snapshot times must be sorted");
    solver.advance(f, t - f.time, dt);
    out.push_back(f);
  }
  if (stats) *stats = solver.stats();
  return out;
}

// Smoothed periodic step low -> high at 0 (and back at +-L), width in grid cells.
inline GridField smoothed_step_1d(int N, double L, double low, double high, double width_cells) {
  GridField f(1, N, L);
  const double w = width_cells * f.h();
  for (int i = 0; i < N; ++i) {
    const double x = f.coord(i);
    const double s = 0.5 + 0.5 * std::tanh(x / w) * std::tanh((L - std::abs(x)) / w);
    f.at(i) = low + (high - low) * s;
  }
  return f;
}

// Smoothed indicator of {|x| > r0}: low inside, high outside.
inline GridField smoothed_disk_2d(int N, double L, double r0, double low, double high, double width_cells) {
  GridField f(2, N, L);
  const double w = width_cells * f.h();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double r = std::hypot(f.coord(i), f.coord(j));
      f.at(i, j) = low + (high - low) * 0.5 * (1 + std::tanh((r - r0) / w));
    }
  return f;
}

}  // namespace fracac
