#include "smart/acceptance.hpp"

#include <vector>

#include "smart/errors.hpp"

namespace smart {

double expected_acceptance_length(const DraftTree& tree) {
  // Each node contributes its cum_prob once per leaf beneath it. Children
  // have larger ids than parents, so a reverse sweep accumulates leaf counts.
  const auto nodes = tree.nodes();
  std::vector<double> leaves_below(nodes.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = nodes.size(); i-- > 1;) {
    if (leaves_below[i] == 0.0) leaves_below[i] = 1.0;
    total += nodes[i].cum_prob * leaves_below[i];
    leaves_below[nodes[i].parent->index] += leaves_below[i];
  }
  return total / static_cast<double>(tree.leaf_count());
}

std::size_t paths_after_adding(const DraftTree& tree, NodeId parent) {
  return tree.leaf_count() + (tree.is_leaf(parent) ? 0 : 1);
}

double marginal_acceptance(const DraftTree& tree, NodeId parent, double draft_prob) {
  if (!tree.contains(parent)) {
    throw StructuralError("marginal_acceptance: unknown parent id " +
                          std::to_string(parent.index));
  }
  if (!(draft_prob >= 0.0 && draft_prob <= 1.0)) {
    throw DomainError("marginal_acceptance: draft_prob outside [0, 1]");
  }
  const double path_prob = tree.node(parent).cum_prob * draft_prob;
  return path_prob / static_cast<double>(paths_after_adding(tree, parent));
}

TreeReward tree_reward(const DraftTree& tree, const CostModelParams& params) {
  TreeReward r;
  r.l_tree = expected_acceptance_length(tree);
  r.c_target = params.c_t * r.l_tree;
  const Cost spec = eval_spec_cost(params, static_cast<double>(tree.size()));
  r.c_spec = spec.ms;
  r.saturated = spec.saturated;
  r.ratio = r.c_spec > 0.0 ? r.c_target / r.c_spec : 0.0;
  return r;
}

}  // namespace smart
