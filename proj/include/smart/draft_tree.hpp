#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace smart {

/// Vocabulary index. The root carries kRootToken since it stands for the
/// last committed token rather than a drafted one.
using Token = std::int32_t;
inline constexpr Token kRootToken = -1;

/// Dense handle into a DraftTree's node arena. Index 0 is always the root.
struct NodeId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId kRoot{0};

struct DraftNode {
  NodeId id;
  std::optional<NodeId> parent;
  Token token = kRootToken;
  int layer = 0;
  /// Conditional probability of this token given the context and ancestors.
  double draft_prob = 1.0;
  /// Product of draft_prob along the root-to-node path.
  double cum_prob = 1.0;
};

/// Append-only layered draft tree.
///
/// Nodes live in an arena indexed by NodeId; parents always have a smaller
/// index than their children, so ascending index order is a topological
/// order. The root is not a drafted token: size() counts non-root nodes only.
/// There is no removal; policies prune by never adding.
class DraftTree {
 public:
  DraftTree();

  /// Appends a child of `parent`. cum_prob is parent.cum_prob * draft_prob.
  /// Throws StructuralError for an unknown parent and DomainError when
  /// draft_prob is outside [0, 1].
  NodeId add_node(NodeId parent, Token token, double draft_prob);

  /// Number of drafted (non-root) nodes.
  std::size_t size() const noexcept { return nodes_.size() - 1; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return size() == 0; }

  bool contains(NodeId id) const noexcept { return id.index < nodes_.size(); }
  const DraftNode& node(NodeId id) const;
  const DraftNode& root() const noexcept { return nodes_.front(); }
  std::span<const DraftNode> nodes() const noexcept { return nodes_; }
  std::span<const NodeId> children(NodeId id) const;

  bool is_leaf(NodeId id) const;
  std::size_t leaf_count() const noexcept { return leaves_.size(); }
  /// Leaves in ascending id order.
  std::vector<NodeId> leaves() const;

  /// One root-to-leaf node sequence per leaf, in ascending leaf order. Each
  /// sequence starts with the root; a root-only tree has one path of drafted
  /// length 0.
  std::vector<std::vector<NodeId>> paths() const;

  /// Drafted tokens on the path from the root to `id` (root excluded).
  std::vector<Token> tokens_to(NodeId id) const;

  /// Deepest layer present (0 for a root-only tree).
  int depth() const noexcept { return depth_; }

 private:
  std::vector<DraftNode> nodes_;
  std::vector<std::vector<NodeId>> children_;
  std::set<NodeId> leaves_;
  int depth_ = 0;
};

/// Line format: `id parent token layer draft_prob`, root line `0 - -1 0 1.0`.
void write_tree(std::ostream& out, const DraftTree& tree);
/// Throws ParseError naming the offending line.
DraftTree read_tree(std::istream& in);

}  // namespace smart
