#include <algorithm>

#include "smart/simulator.hpp"

namespace smart {

Token sample_categorical(const Eigen::VectorXd& weights, KeyedStream& rng) {
  const double total = weights.sum();
  const double u = rng.uniform() * total;
  double acc = 0.0;
  Token last_positive = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<Token>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

namespace {

std::optional<NodeId> child_with_token(const DraftTree& tree, NodeId node, Token token) {
  for (NodeId c : tree.children(node)) {
    if (tree.node(c).token == token) return c;
  }
  return std::nullopt;
}

}  // namespace

VerifyOutcome verify_tree(const DraftTree& tree, const CategoricalModel& target,
                          const CategoricalModel& draft, std::span<const Token> context,
                          AcceptanceMode mode, KeyedStream& rng) {
  VerifyOutcome out;
  std::vector<Token> ctx(context.begin(), context.end());
  NodeId node = kRoot;
  while (true) {
    const Eigen::VectorXd p = target.probs(ctx);
    if (mode != AcceptanceMode::stochastic) {
      const Token next =
          mode == AcceptanceMode::greedy_match ? argmax_of(p) : sample_categorical(p, rng);
      const auto child = child_with_token(tree, node, next);
      if (!child) {
        out.bonus = next;
        return out;
      }
      out.accepted.push_back(*child);
      ctx.push_back(next);
      node = *child;
      continue;
    }

    auto children = std::vector<NodeId>(tree.children(node).begin(), tree.children(node).end());
    if (children.empty()) {
      out.bonus = sample_categorical(p, rng);
      return out;
    }
    std::stable_sort(children.begin(), children.end(), [&](NodeId a, NodeId b) {
      const DraftNode& na = tree.node(a);
      const DraftNode& nb = tree.node(b);
      if (na.draft_prob != nb.draft_prob) return na.draft_prob > nb.draft_prob;
      return na.token < nb.token;
    });
    const Eigen::VectorXd q = draft.probs(ctx);
    Eigen::VectorXd residual = p;
    std::optional<NodeId> accepted;
    for (NodeId c : children) {
      const Token t = tree.node(c).token;
      const double qt = q[t];
      const double ratio = qt > 0.0 ? residual[t] / qt : (residual[t] > 0.0 ? 1.0 : 0.0);
      if (rng.uniform() < std::min(1.0, ratio)) {
        accepted = c;
        break;
      }
      Eigen::VectorXd next = (residual - q).cwiseMax(0.0);
      const double mass = next.sum();
      // An all-zero residual means p <= q everywhere; keep the current one.
      if (mass > 0.0) residual = next / mass;
    }
    if (!accepted) {
      out.bonus = sample_categorical(residual, rng);
      return out;
    }
    out.accepted.push_back(*accepted);
    ctx.push_back(tree.node(*accepted).token);
    node = *accepted;
  }
}

}  // namespace smart
