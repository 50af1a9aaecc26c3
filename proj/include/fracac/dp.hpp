#pragma once

#include <stdexcept>
#include <vector>

#include "fracac/rng.hpp"
#include "fracac/scheme.hpp"
#include "fracac/tree.hpp"
#include "fracac/voting.hpp"

namespace fracac {

// Exact root-vote probability given topology and leaf positions. Values are
// conditional on the node being unmarked; marking of children is folded into
// the composed function.
inline double dp_root_probability(const BranchingTree& tree, const VoteScheme& scheme, double b) {
  if (scheme.kind == SchemeKind::ExpMarked)
    throw std::invalid_argument("dp_root_probability: ExpMarked marks depend on the path; sample it instead");
  std::vector<double> val(tree.nodes.size());
  for (std::size_t k = tree.nodes.size(); k-- > 0;) {
    const auto& n = tree.nodes[k];
    if (n.leaf) {
      val[k] = scheme.leaf_probability(n.position);
      continue;
    }
    const double p1 = val[n.first_child], p2 = val[n.first_child + 1], p3 = val[n.first_child + 2];
    switch (scheme.kind) {
      case SchemeKind::Majority: val[k] = g(p1, p2, p3); break;
      case SchemeKind::Marked: val[k] = g_times(p1, p2, p3, b); break;
      case SchemeKind::BiasedPlus: val[k] = g_plus(p1, p2, p3, b); break;
      case SchemeKind::BiasedMinus: val[k] = g_minus(p1, p2, p3, b); break;
      default: break;
    }
  }
  return val.front();
}

// One realization of the root vote on a marked tree. vote_salt = 0 reuses the
// per-label vote streams of the lazy evaluator; other salts give fresh votes.
inline int sample_root_vote(const BranchingTree& tree, const VoteScheme& scheme, std::uint64_t vote_salt = 0) {
  const bool marked_scheme = scheme.kind != SchemeKind::Majority;
  std::vector<int> vote(tree.nodes.size());
  for (std::size_t k = tree.nodes.size(); k-- > 0;) {
    const auto& n = tree.nodes[k];
    if (n.mark && !marked_scheme) throw std::logic_error("sample_root_vote: marks present under Majority");
    if (n.mark && k == 0 && scheme.bernoulli_marks()) throw std::logic_error("sample_root_vote: root marked");
    Stream s(vote_key(n.key, vote_salt), Purpose::Vote);
    if (n.mark) {
      const int v = scheme.marked_vote();
      vote[k] = v >= 0 ? v : (s.uniform() < 0.5 ? 1 : 0);
    } else if (n.leaf) {
      vote[k] = s.uniform() < scheme.leaf_probability(n.position) ? 1 : 0;
    } else {
      vote[k] = (vote[n.first_child] + vote[n.first_child + 1] + vote[n.first_child + 2]) >= 2 ? 1 : 0;
    }
  }
  return vote.front();
}

}  // namespace fracac
