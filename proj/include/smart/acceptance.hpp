#pragma once

#include "smart/cost_model.hpp"
#include "smart/draft_tree.hpp"

namespace smart {

/// Expected number of accepted drafted tokens: the mean over root-to-leaf
/// paths of the sum of cumulative probabilities along each path. A root-only
/// tree has a single empty path and returns 0.
double expected_acceptance_length(const DraftTree& tree);

/// Path count |P| after hypothetically attaching one child to `parent`:
/// unchanged when the parent is a leaf, one more otherwise.
std::size_t paths_after_adding(const DraftTree& tree, NodeId parent);

/// Estimated gain in expected acceptance length from attaching a child with
/// conditional probability `draft_prob` under `parent`, diluted by the path
/// count after the addition.
double marginal_acceptance(const DraftTree& tree, NodeId parent, double draft_prob);

struct TreeReward {
  double l_tree = 0.0;
  double c_target = 0.0;  ///< c_T * l_tree
  double c_spec = 0.0;    ///< C_draft(|T|) + C_verify(|T|)
  double ratio = 0.0;     ///< c_target / c_spec, 0 when c_spec is 0
  bool saturated = false;
};

/// Expected speedup of `tree` under `params`. The root-only tree (c_spec 0
/// with zero biases) is assigned ratio 0.
TreeReward tree_reward(const DraftTree& tree, const CostModelParams& params);

}  // namespace smart
