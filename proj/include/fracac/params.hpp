#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "fracac/voting.hpp"

namespace fracac {

// Normalising constant of the fractional generator. Accepts the closed
// boundary alpha = 1 as a reference value.
inline double sigma_alpha(double alpha) {
  if (!(alpha >= 1.0 && alpha < 2.0)) throw std::domain_error("sigma_alpha: alpha must lie in [1,2)");
  return std::pow((2 - alpha) / alpha, alpha / 2) * boost::math::tgamma(1 - alpha / 2);
}

struct ScalingPreset {
  enum class Kind { LogExample, PowerExample, Power };
  Kind kind = Kind::LogExample;
  double delta = 0.0;  // exponent for Kind::Power

  static ScalingPreset log_example() { return {Kind::LogExample, 0.0}; }
  static ScalingPreset power_example() { return {Kind::PowerExample, 0.0}; }
  static ScalingPreset power(double delta) { return {Kind::Power, delta}; }

  void validate(double alpha) const {
    if (kind == Kind::Power && !(delta > 1.0 / alpha && delta < 1.0))
      throw std::domain_error("Power(delta) requires 1/alpha < delta < 1");
  }

  static double power_example_exponent(double alpha) {
    return (3 * alpha + 1) / (2 * alpha * (1 + alpha));
  }

  double operator()(double eps, double alpha) const {
    switch (kind) {
      case Kind::LogExample: return eps * std::abs(std::log(eps));
      case Kind::PowerExample: return std::pow(eps, power_example_exponent(alpha));
      case Kind::Power: return std::pow(eps, delta);
    }
    return NAN;
  }

  std::string name() const {
    switch (kind) {
      case Kind::LogExample: return "log";
      case Kind::PowerExample: return "power_example";
      case Kind::Power: return "power:" + std::to_string(delta);
    }
    return "?";
  }

  static ScalingPreset parse(const std::string& s) {
    if (s == "log") return log_example();
    if (s == "power_example") return power_example();
    if (s.rfind("power:", 0) == 0) return power(std::stod(s.substr(6)));
    throw std::invalid_argument("unknown scaling preset: " + s);
  }

  bool operator==(const ScalingPreset&) const = default;
};

struct ModelParams {
  double alpha = 1.5;
  double epsilon = 0.1;
  ScalingPreset scaling;

  double I_val = 0;
  double sigma = 0;
  double speed = 0;
  double branch_rate = 0;
  double trunc_level = 0;
  double b_eps = 0;
  std::optional<FixedPoints> fixed;

  ModelParams() : ModelParams(1.5, 0.1, ScalingPreset::log_example()) {}

  ModelParams(double a, double e, ScalingPreset s) : alpha(a), epsilon(e), scaling(s) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::domain_error("alpha must lie in (1,2]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0,1)");
    scaling.validate(alpha);
    I_val = scaling(epsilon, alpha);
    sigma = brownian() ? 1.0 : sigma_alpha(alpha);
    speed = sigma * std::pow(I_val, alpha - 2);
    branch_rate = 1.0 / (epsilon * epsilon);
    trunc_level = ((2 - alpha) / alpha) * I_val * I_val;
    b_eps = epsilon * epsilon / (epsilon * epsilon + I_val * I_val);
    if (b_eps < 1.0 / 3.0) fixed = fixed_points(b_eps);
  }

  bool brownian() const { return alpha == 2.0; }
  double log_eps() const { return std::abs(std::log(epsilon)); }
  double large_jump_rate() const { return 1.0 / (I_val * I_val); }

  const FixedPoints& phases() const {
    if (!fixed) throw std::domain_error("b_eps >= 1/3: fixed points u_-, u_+ do not exist");
    return *fixed;
  }
  double u_minus() const { return phases().u_minus; }
  double u_plus() const { return phases().u_plus; }
};

// Interface-sharpness error functional.
inline double F_eps(const ModelParams& p) {
  if (p.brownian()) throw std::domain_error("F_eps: alpha must lie in (1,2)");
  const double I = p.I_val;
  return I * I * std::pow(p.epsilon, -2.0 / p.alpha) * p.log_eps() + std::pow(I, p.alpha - 1);
}

struct AssumptionRow {
  double epsilon;
  double I;
  double width[3];  // I |log eps|^k, k = 1..3
  double marking;   // eps^2 I^-2 |log eps|
  double tails;     // I^{2 alpha} eps^-2 |log eps|^alpha
};

struct AssumptionReport {
  std::vector<AssumptionRow> rows;
  bool width_decreasing[3] = {true, true, true};
  bool marking_decreasing = true;
  bool tails_decreasing = true;
  bool all_ok() const {
    return width_decreasing[0] && width_decreasing[1] && width_decreasing[2] && marking_decreasing &&
           tails_decreasing;
  }
};

// eps_grid is read from coarse to fine; "decreasing" is checked on the second
// half of the grid.
template <class ScaleFn>
  requires std::is_invocable_r_v<double, ScaleFn, double>
AssumptionReport assumption_report(ScaleFn&& I_of, double alpha, const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("assumption_report: empty grid");
  AssumptionReport rep;
  for (double e : eps_grid) {
    const double I = I_of(e), L = std::abs(std::log(e));
    rep.rows.push_back({e, I, {I * L, I * L * L, I * L * L * L}, e * e / (I * I) * L,
                        std::pow(I, 2 * alpha) / (e * e) * std::pow(L, alpha)});
  }
  const std::size_t start = rep.rows.size() / 2;
  for (std::size_t i = start + 1; i < rep.rows.size(); ++i) {
    const auto &a = rep.rows[i - 1], &b = rep.rows[i];
    for (int k = 0; k < 3; ++k)
      if (!(b.width[k] < a.width[k])) rep.width_decreasing[k] = false;
    if (!(b.marking < a.marking)) rep.marking_decreasing = false;
    if (!(b.tails < a.tails)) rep.tails_decreasing = false;
  }
  return rep;
}

inline AssumptionReport assumption_report(const ScalingPreset& preset, double alpha,
                                          const std::vector<double>& eps_grid) {
  preset.validate(alpha);
  return assumption_report([&](double e) { return preset(e, alpha); }, alpha, eps_grid);
}

}  // namespace fracac
