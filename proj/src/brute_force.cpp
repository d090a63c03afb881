#include <algorithm>
#include <string>
#include <vector>

#include "smart/errors.hpp"
#include "smart/policy.hpp"

namespace smart {

namespace {

struct Search {
  const DraftTree& candidates;
  const CostModelParams& params;
  std::size_t budget;

  std::vector<bool> chosen;
  std::size_t chosen_count = 0;

  bool have_best = false;
  TreeReward best_reward;
  std::vector<std::uint32_t> best_set;
  std::size_t evaluated = 0;

  DraftTree materialise(const std::vector<bool>& mask) const {
    DraftTree t;
    std::vector<NodeId> remap(candidates.node_count(), kRoot);
    for (const DraftNode& n : candidates.nodes().subspan(1)) {
      if (!mask[n.id.index]) continue;
      remap[n.id.index] = t.add_node(remap[n.parent->index], n.token, n.draft_prob);
    }
    return t;
  }

  void evaluate() {
    ++evaluated;
    const TreeReward r = tree_reward(materialise(chosen), params);
    std::vector<std::uint32_t> set;
    for (std::uint32_t i = 1; i < chosen.size(); ++i) {
      if (chosen[i]) set.push_back(i);
    }
    bool better = !have_best;
    if (have_best) {
      if (r.ratio != best_reward.ratio) {
        better = r.ratio > best_reward.ratio;
      } else if (set.size() != best_set.size()) {
        better = set.size() < best_set.size();
      } else {
        better = set < best_set;
      }
    }
    if (better) {
      have_best = true;
      best_reward = r;
      best_set = std::move(set);
    }
  }

  // Ids ascend parent-before-child, so deciding nodes in id order only ever
  // needs the parent's decision.
  void visit(std::uint32_t i) {
    if (i == chosen.size()) {
      evaluate();
      return;
    }
    visit(i + 1);
    const NodeId parent = *candidates.node(NodeId{i}).parent;
    if (chosen[parent.index] && chosen_count < budget) {
      chosen[i] = true;
      ++chosen_count;
      visit(i + 1);
      chosen[i] = false;
      --chosen_count;
    }
  }
};

}  // namespace

OracleResult brute_force_optimal(const DraftDistribution& draft,
                                 std::span<const Token> context,
                                 const CostModelParams& params,
                                 const BuildConfig& config) {
  config.validate();
  params.validate();
  std::size_t total = 0;
  std::size_t width = 1;
  for (std::size_t layer = 1; layer <= config.d; ++layer) {
    width *= config.k;
    total += width;
    if (total > kMaxOracleCandidates) {
      throw CapacityError("brute_force_optimal: candidate tree exceeds " +
                          std::to_string(kMaxOracleCandidates) + " nodes");
    }
  }

  DraftTree candidates;
  std::vector<NodeId> frontier{kRoot};
  for (std::size_t layer = 1; layer <= config.d; ++layer) {
    std::vector<NodeId> next;
    for (NodeId parent : frontier) {
      std::vector<Token> full(context.begin(), context.end());
      const auto drafted = candidates.tokens_to(parent);
      full.insert(full.end(), drafted.begin(), drafted.end());
      for (const TokenProb& tp : draft.top_k(full, config.k)) {
        next.push_back(candidates.add_node(parent, tp.token, tp.prob));
      }
    }
    frontier = std::move(next);
  }

  Search search{candidates, params, config.per_sequence_budget(), {}, 0, false, {}, {}, 0};
  search.chosen.assign(candidates.node_count(), false);
  search.chosen[0] = true;
  search.visit(1);

  std::vector<bool> mask(candidates.node_count(), false);
  mask[0] = true;
  for (std::uint32_t i : search.best_set) mask[i] = true;
  return {search.materialise(mask), search.best_reward, search.evaluated};
}

}  // namespace smart
