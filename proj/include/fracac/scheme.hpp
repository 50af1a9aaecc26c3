#pragma once

#include <stdexcept>
#include <string>

#include "fracac/params.hpp"
#include "fracac/point.hpp"

namespace fracac {

// Leaf vote probability as a function of terminal position.
struct InitialCondition {
  enum class Kind { Constant, Step, OutsideSphere };
  Kind kind = Kind::Step;
  double low = 0.0;   // value below the threshold / inside the sphere
  double high = 1.0;  // value at or above the threshold / outside
  double threshold = 0.0;  // step location on axis 0, or sphere radius

  static InitialCondition constant(double c) { return {Kind::Constant, c, c, 0.0}; }
  static InitialCondition step(double lo = 0.0, double hi = 1.0, double at = 0.0) { return {Kind::Step, lo, hi, at}; }
  static InitialCondition phat(const ModelParams& p) { return step(p.u_minus(), p.u_plus()); }
  static InitialCondition outside_sphere(double r0, double lo = 0.0, double hi = 1.0) {
    return {Kind::OutsideSphere, lo, hi, r0};
  }

  double operator()(const Point& x) const {
    switch (kind) {
      case Kind::Constant: return low;
      case Kind::Step: return x[0] >= threshold ? high : low;
      case Kind::OutsideSphere: return x.norm() >= threshold ? high : low;
    }
    return NAN;
  }

  void validate() const {
    if (low < 0 || low > 1 || high < 0 || high > 1)
      throw std::invalid_argument("initial condition must map into [0,1]");
  }
};

enum class SchemeKind { Majority, Marked, ExpMarked, BiasedPlus, BiasedMinus };

// Which lifetime an exponential mark is compared against at a leaf.
enum class LeafMarkRule {
  Horizon,   // large jump before min(lifetime, remaining time)
  Lifetime,  // large jump before the full exponential lifetime
};

struct VoteScheme {
  SchemeKind kind = SchemeKind::Majority;
  InitialCondition initial;
  LeafMarkRule leaf_rule = LeafMarkRule::Lifetime;

  double leaf_probability(const Point& x) const { return initial(x); }

  // Vote of a marked individual, or -1 for a fair coin.
  int marked_vote() const {
    switch (kind) {
      case SchemeKind::BiasedPlus: return 1;
      case SchemeKind::BiasedMinus: return 0;
      default: return -1;
    }
  }
  bool bernoulli_marks() const {
    return kind == SchemeKind::Marked || kind == SchemeKind::BiasedPlus || kind == SchemeKind::BiasedMinus;
  }
};

inline std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Majority: return "majority";
    case SchemeKind::Marked: return "marked";
    case SchemeKind::ExpMarked: return "exp_marked";
    case SchemeKind::BiasedPlus: return "biased_plus";
    case SchemeKind::BiasedMinus: return "biased_minus";
  }
  return "?";
}

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "majority") return SchemeKind::Majority;
  if (s == "marked") return SchemeKind::Marked;
  if (s == "exp_marked") return SchemeKind::ExpMarked;
  if (s == "biased_plus") return SchemeKind::BiasedPlus;
  if (s == "biased_minus") return SchemeKind::BiasedMinus;
  throw std::invalid_argument("unknown scheme: " + s);
}

}  // namespace fracac
