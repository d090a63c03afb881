#include <algorithm>
#include <vector>

#include "smart/policy.hpp"

namespace smart {

namespace {

std::vector<NodeId> rank_by_cum_prob(const DraftTree& tree, std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    const double pa = tree.node(a).cum_prob;
    const double pb = tree.node(b).cum_prob;
    if (pa != pb) return pa > pb;
    return a < b;
  });
  return ids;
}

}  // namespace

DraftTree baseline_build(const DraftDistribution& draft, std::span<const Token> context,
                         const CostModelParams& /*params*/, const BuildConfig& config) {
  config.validate();

  // Stage 1: expand the global top-k of each layer.
  DraftTree generated;
  std::vector<NodeId> layer_nodes{kRoot};
  for (std::size_t layer = 1; layer <= config.d && !layer_nodes.empty(); ++layer) {
    auto ranked = rank_by_cum_prob(generated, layer_nodes);
    if (ranked.size() > config.k) ranked.resize(config.k);
    std::vector<NodeId> next;
    for (NodeId parent : ranked) {
      std::vector<Token> full(context.begin(), context.end());
      const auto drafted = generated.tokens_to(parent);
      full.insert(full.end(), drafted.begin(), drafted.end());
      for (const TokenProb& tp : draft.top_k(full, config.k)) {
        next.push_back(generated.add_node(parent, tp.token, tp.prob));
      }
    }
    layer_nodes = std::move(next);
  }

  // Stage 2: keep the top-g by cumulative probability. A node whose
  // ancestors are missing brings them along if the total still fits in g;
  // otherwise it is skipped in favour of the next-ranked node.
  std::vector<NodeId> all(generated.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = NodeId{static_cast<std::uint32_t>(i + 1)};
  const auto ranked = rank_by_cum_prob(generated, std::move(all));

  std::vector<bool> keep(generated.node_count(), false);
  keep[0] = true;
  std::size_t kept = 0;
  for (NodeId id : ranked) {
    if (kept >= config.rerank_g) break;
    if (keep[id.index]) continue;
    std::vector<NodeId> missing;
    for (std::optional<NodeId> cur = id; cur && !keep[cur->index];
         cur = generated.node(*cur).parent) {
      missing.push_back(*cur);
    }
    if (kept + missing.size() > config.rerank_g) continue;
    for (NodeId m : missing) keep[m.index] = true;
    kept += missing.size();
  }

  DraftTree out;
  std::vector<NodeId> remap(generated.node_count(), kRoot);
  for (const DraftNode& n : generated.nodes().subspan(1)) {
    if (!keep[n.id.index]) continue;
    remap[n.id.index] = out.add_node(remap[n.parent->index], n.token, n.draft_prob);
  }
  return out;
}

}  // namespace smart
