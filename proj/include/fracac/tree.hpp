#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracac/geometry.hpp"
#include "fracac/levy.hpp"
#include "fracac/params.hpp"
#include "fracac/point.hpp"
#include "fracac/rng.hpp"
#include "fracac/scheme.hpp"

namespace fracac {

inline constexpr std::int64_t kDefaultNodeBudget = 10'000'000;

struct BudgetExceeded : std::runtime_error {
  std::int64_t nodes;
  explicit BudgetExceeded(std::int64_t n)
      : std::runtime_error("node budget exceeded after " + std::to_string(n) + " nodes"), nodes(n) {}
};

enum class MotionKind { Stable1D, StableD, SubordinatedTruncated, SubordinatedFull, ZPlus, ZMinus };

struct MotionSpec {
  MotionKind kind = MotionKind::Stable1D;
  int dim = 1;
  std::optional<SphereFlow> geometry;
  double shift_l = 0.0;
  double beta = 0.0;
  double resolution_ratio = kDefaultResolutionRatio;  // small-jump cutoff / trunc_level

  static MotionSpec stable(int dim = 1) { return {dim == 1 ? MotionKind::Stable1D : MotionKind::StableD, dim}; }
  static MotionSpec truncated(int dim = 1, double ratio = kDefaultResolutionRatio) {
    return {MotionKind::SubordinatedTruncated, dim, std::nullopt, 0.0, 0.0, ratio};
  }
  static MotionSpec full(int dim = 1, double ratio = kDefaultResolutionRatio) {
    return {MotionKind::SubordinatedFull, dim, std::nullopt, 0.0, 0.0, ratio};
  }
  static MotionSpec z(int sign, const SphereFlow& flow, double l, double beta,
                      double ratio = kDefaultResolutionRatio) {
    return {sign > 0 ? MotionKind::ZPlus : MotionKind::ZMinus, flow.dim, flow, l, beta, ratio};
  }

  bool subordinated() const {
    return kind == MotionKind::SubordinatedTruncated || kind == MotionKind::SubordinatedFull ||
           kind == MotionKind::ZPlus || kind == MotionKind::ZMinus;
  }
  bool shifted() const { return kind == MotionKind::ZPlus || kind == MotionKind::ZMinus; }

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("MotionSpec: dim must be 1..3");
    if (kind == MotionKind::Stable1D && dim != 1) throw std::invalid_argument("Stable1D needs dim 1");
    if (shifted() && (!geometry || dim < 2 || geometry->dim != dim))
      throw std::invalid_argument("ZPlus/ZMinus need a sphere flow of matching dim >= 2");
  }
};

inline std::string to_string(MotionKind k) {
  switch (k) {
    case MotionKind::Stable1D: return "stable1d";
    case MotionKind::StableD: return "stable";
    case MotionKind::SubordinatedTruncated: return "sub_truncated";
    case MotionKind::SubordinatedFull: return "sub_full";
    case MotionKind::ZPlus: return "z_plus";
    case MotionKind::ZMinus: return "z_minus";
  }
  return "?";
}

inline MotionKind parse_motion(const std::string& s) {
  for (auto k : {MotionKind::Stable1D, MotionKind::StableD, MotionKind::SubordinatedTruncated,
                 MotionKind::SubordinatedFull, MotionKind::ZPlus, MotionKind::ZMinus})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown motion: " + s);
}

// Per-node displacement, driven only by the node's label-keyed substreams.
class MotionEngine {
 public:
  MotionEngine(const ModelParams& p, const MotionSpec& spec) : p_(p), spec_(spec) {
    spec_.validate();
    if (spec_.subordinated()) law_ = TruncatedLaw::with_ratio(p, spec_.resolution_ratio);
  }

  const ModelParams& params() const { return p_; }
  const MotionSpec& spec() const { return spec_; }

  Point advance(std::uint64_t key, double dt, Point pos) const {
    if (!(dt > 0)) return pos;
    switch (spec_.kind) {
      case MotionKind::Stable1D:
      case MotionKind::StableD: {
        Stream m(key, Purpose::Motion);
        return pos + sample_stable_increment(p_, dt, spec_.dim, m);
      }
      default: break;
    }
    Stream small(key, Purpose::SmallJumps), m(key, Purpose::Motion);
    const double dr = truncated_increment(law_, dt, small);
    const double s = std::sqrt(2 * dr);
    for (int i = 0; i < spec_.dim; ++i) pos[i] += s * m.normal();
    if (spec_.kind == MotionKind::SubordinatedFull && !p_.brownian()) {
      Stream large(key, Purpose::LargeJumps);
      const double rate = p_.large_jump_rate();
      double L = 0;
      for (double t = large.exponential(rate); t < dt; t += large.exponential(rate)) L += large_jump_size(p_, large);
      if (L > 0) {
        Stream lm(key, Purpose::LargeJumpMotion);
        const double sl = std::sqrt(2 * L);
        for (int i = 0; i < spec_.dim; ++i) pos[i] += sl * lm.normal();
      }
    }
    return pos;
  }

  // First large-jump time of the node's full subordinator (infinite without one).
  double first_large_jump(std::uint64_t key) const {
    if (!spec_.subordinated() || p_.brownian()) return std::numeric_limits<double>::infinity();
    Stream large(key, Purpose::LargeJumps);
    return large.exponential(p_.large_jump_rate());
  }

  // Position at which a leaf votes; leaves sit at flow time 0.
  Point leaf_position(const Point& pos) const {
    if (!spec_.shifted()) return pos;
    return z_shift(pos, 0.0, *spec_.geometry, p_, spec_.shift_l, spec_.beta,
                   spec_.kind == MotionKind::ZPlus ? 1 : -1);
  }

 private:
  ModelParams p_;
  MotionSpec spec_;
  TruncatedLaw law_;
};

inline double node_lifetime(std::uint64_t key, const ModelParams& p) {
  Stream s(key, Purpose::Lifetime);
  return s.exponential(p.branch_rate);
}

inline std::uint64_t vote_key(std::uint64_t key, std::uint64_t salt) {
  return salt == 0 ? key : mix64(key ^ mix64(salt));
}

// ---------------------------------------------------------------------------
// Eager tree

struct TreeNode {
  std::string label;  // Ulam-Harris word over {1,2,3}; empty for the root
  std::uint64_t key = 0;
  int parent = -1;
  int first_child = -1;  // children occupy first_child .. first_child+2
  double birth = 0;
  double death = 0;
  double lifetime = 0;  // untruncated exponential lifetime
  bool leaf = true;
  bool mark = false;
  double tau_cross = std::numeric_limits<double>::infinity();
  Point position;  // terminal position; for leaves, the voting position
};

struct BranchingTree {
  double horizon = 0;
  std::uint64_t seed = 0;
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }
  std::size_t leaf_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.leaf;
    return c;
  }
  int depth_of(int i) const { return static_cast<int>(nodes[i].label.size()); }
};

inline BranchingTree generate_topology(const ModelParams& p, double horizon, std::int64_t node_budget,
                                       std::uint64_t seed) {
  if (!(horizon >= 0) || node_budget < 1) throw std::invalid_argument("generate_topology: bad arguments");
  BranchingTree tree{horizon, seed, {}};
  TreeNode root;
  root.key = root_key(seed);
  tree.nodes.push_back(root);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode& n = tree.nodes[i];
    n.lifetime = node_lifetime(n.key, p);
    const double end = n.birth + n.lifetime;
    n.leaf = !(end < horizon);
    n.death = n.leaf ? horizon : end;
    if (n.leaf) continue;
    if (static_cast<std::int64_t>(tree.nodes.size()) + 3 > node_budget)
      throw BudgetExceeded(static_cast<std::int64_t>(tree.nodes.size()) + 3);
    const std::string label = n.label;
    const std::uint64_t key = n.key;
    const double death = n.death;
    n.first_child = static_cast<int>(tree.nodes.size());
    for (int c = 1; c <= 3; ++c) {
      TreeNode ch;
      ch.label = label + static_cast<char>('0' + c);
      ch.key = child_key(key, c);
      ch.parent = static_cast<int>(i);
      ch.birth = death;
      tree.nodes.push_back(ch);
    }
  }
  return tree;
}

// Nodes are stored parents-first, so one forward pass suffices.
inline void attach_motion(BranchingTree& tree, const MotionSpec& spec, const ModelParams& p, const Point& root_position) {
  const MotionEngine eng(p, spec);
  if (root_position.dim != spec.dim) throw std::invalid_argument("attach_motion: root dimension mismatch");
  for (auto& n : tree.nodes) {
    const Point start = n.parent < 0 ? root_position : tree.nodes[n.parent].position;
    n.position = eng.advance(n.key, n.death - n.birth, start);
    if (n.leaf) n.position = eng.leaf_position(n.position);
    n.tau_cross = eng.first_large_jump(n.key);
  }
}

enum class MarkMode { Bernoulli, Exponential };

inline void sample_marks(BranchingTree& tree, MarkMode mode, const ModelParams& p,
                         LeafMarkRule rule = LeafMarkRule::Lifetime) {
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    auto& n = tree.nodes[i];
    if (mode == MarkMode::Bernoulli) {
      Stream s(n.key, Purpose::Mark);
      n.mark = i > 0 && s.uniform() < p.b_eps;
    } else {
      if (std::isinf(n.tau_cross) && !p.brownian())
        throw std::logic_error("exponential marks need large-jump records from a subordinated attachment");
      const double window = (n.leaf && rule == LeafMarkRule::Horizon) ? n.death - n.birth : n.lifetime;
      n.mark = n.tau_cross < window;
    }
  }
}

inline void dump_tree(const BranchingTree& tree, std::ostream& os) {
  for (const auto& n : tree.nodes) {
    os << (n.label.empty() ? "-" : n.label) << ' ' << n.birth << ' ' << n.death << ' ' << (n.mark ? 1 : 0);
    for (int i = 0; i < n.position.dim; ++i) os << ' ' << n.position[i];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Lazy depth-first evaluation

struct NodeView {
  std::uint64_t key;
  int depth;
  double birth;
  double lifetime;
  double remaining;  // time left to the horizon at birth
  bool is_root;
};

struct LazyOptions {
  bool short_circuit = true;
  std::int64_t node_budget = kDefaultNodeBudget;
};

struct LazyStats {
  std::int64_t visits = 0;
  std::int64_t live = 0;
  std::int64_t peak_live = 0;
  int max_depth = 0;
};

// Visitor contract:
//   std::optional<int> resolve(const NodeView&)  -- decide a node without descending (marks)
//   int leaf(const NodeView&, const Point& voting_position)
// Internal nodes take the majority of their three children.
template <class Visitor>
class LazyEvaluator {
 public:
  LazyEvaluator(const MotionEngine& eng, Visitor& vis, LazyOptions opt = {})
      : eng_(eng), vis_(vis), opt_(opt) {}

  int run(std::uint64_t seed, double horizon, const Point& root) {
    return visit(root_key(seed), 0, 0.0, horizon, root);
  }
  const LazyStats& stats() const { return stats_; }

 private:
  struct LiveGuard {
    LazyStats& s;
    explicit LiveGuard(LazyStats& st) : s(st) {
      if (++s.live > s.peak_live) s.peak_live = s.live;
    }
    ~LiveGuard() { --s.live; }
  };

  int visit(std::uint64_t key, int depth, double birth, double remaining, const Point& start) {
    if (++stats_.visits > opt_.node_budget) throw BudgetExceeded(stats_.visits);
    LiveGuard guard(stats_);
    if (depth > stats_.max_depth) stats_.max_depth = depth;
    const double life = node_lifetime(key, eng_.params());
    const NodeView view{key, depth, birth, life, remaining, depth == 0};
    if (auto v = vis_.resolve(view)) return *v;
    const bool leaf = !(life < remaining);
    const Point end = eng_.advance(key, leaf ? remaining : life, start);
    if (leaf) return vis_.leaf(view, eng_.leaf_position(end));
    const double rest = remaining - life, t = birth + life;
    const int a = visit(child_key(key, 1), depth + 1, t, rest, end);
    const int b = visit(child_key(key, 2), depth + 1, t, rest, end);
    if (opt_.short_circuit && a == b) return a;
    const int c = visit(child_key(key, 3), depth + 1, t, rest, end);
    return (a + b + c) >= 2 ? 1 : 0;
  }

  const MotionEngine& eng_;
  Visitor& vis_;
  LazyOptions opt_;
  LazyStats stats_;
};

// Root-vote visitor for the five schemes.
class SchemeVisitor {
 public:
  SchemeVisitor(const VoteScheme& scheme, const MotionEngine& eng, std::uint64_t vote_salt = 0)
      : scheme_(scheme), eng_(eng), salt_(vote_salt) {
    scheme_.initial.validate();
    if (scheme_.kind == SchemeKind::ExpMarked && !eng.spec().subordinated() && !eng.params().brownian())
      throw std::invalid_argument("ExpMarked needs a subordinated motion");
  }

  std::optional<int> resolve(const NodeView& n) const {
    bool marked = false;
    if (scheme_.bernoulli_marks()) {
      if (!n.is_root) {
        Stream s(n.key, Purpose::Mark);
        marked = s.uniform() < eng_.params().b_eps;
      }
    } else if (scheme_.kind == SchemeKind::ExpMarked) {
      const bool leaf = !(n.lifetime < n.remaining);
      const double window = (leaf && scheme_.leaf_rule == LeafMarkRule::Horizon) ? n.remaining : n.lifetime;
      marked = eng_.first_large_jump(n.key) < window;
    }
    if (!marked) return std::nullopt;
    const int v = scheme_.marked_vote();
    if (v >= 0) return v;
    Stream s(vote_key(n.key, salt_), Purpose::Vote);
    return s.uniform() < 0.5 ? 1 : 0;
  }

  int leaf(const NodeView& n, const Point& x) const {
    Stream s(vote_key(n.key, salt_), Purpose::Vote);
    return s.uniform() < scheme_.leaf_probability(x) ? 1 : 0;
  }

 private:
  VoteScheme scheme_;
  const MotionEngine& eng_;
  std::uint64_t salt_;
};

inline int lazy_root_vote(const ModelParams& p, double horizon, const MotionSpec& spec, const VoteScheme& scheme,
                          std::uint64_t seed, const Point& root, LazyOptions opt = {}, LazyStats* stats = nullptr) {
  const MotionEngine eng(p, spec);
  SchemeVisitor vis(scheme, eng);
  LazyEvaluator<SchemeVisitor> ev(eng, vis, opt);
  const int v = ev.run(seed, horizon, root);
  if (stats) *stats = ev.stats();
  return v;
}

}  // namespace fracac
