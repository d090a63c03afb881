#include "smart/draft_tree.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "smart/errors.hpp"
#include "text_util.hpp"

namespace smart {

DraftTree::DraftTree() {
  nodes_.push_back(DraftNode{});
  children_.emplace_back();
  leaves_.insert(kRoot);
}

NodeId DraftTree::add_node(NodeId parent, Token token, double draft_prob) {
  if (!contains(parent)) {
    throw StructuralError("add_node: unknown parent id " +
                          std::to_string(parent.index));
  }
  if (!(draft_prob >= 0.0 && draft_prob <= 1.0)) {
    throw DomainError("add_node: draft_prob outside [0, 1]: " +
                      std::to_string(draft_prob));
  }
  const DraftNode& p = nodes_[parent.index];
  DraftNode child;
  child.id = NodeId{static_cast<std::uint32_t>(nodes_.size())};
  child.parent = parent;
  child.token = token;
  child.layer = p.layer + 1;
  child.draft_prob = draft_prob;
  child.cum_prob = p.cum_prob * draft_prob;

  depth_ = std::max(depth_, child.layer);
  leaves_.erase(parent);
  leaves_.insert(child.id);
  children_[parent.index].push_back(child.id);
  children_.emplace_back();
  nodes_.push_back(child);
  return child.id;
}

const DraftNode& DraftTree::node(NodeId id) const {
  if (!contains(id)) {
    throw StructuralError("unknown node id " + std::to_string(id.index));
  }
  return nodes_[id.index];
}

std::span<const NodeId> DraftTree::children(NodeId id) const {
  if (!contains(id)) {
    throw StructuralError("unknown node id " + std::to_string(id.index));
  }
  return children_[id.index];
}

bool DraftTree::is_leaf(NodeId id) const { return children(id).empty(); }

std::vector<NodeId> DraftTree::leaves() const {
  return {leaves_.begin(), leaves_.end()};
}

std::vector<std::vector<NodeId>> DraftTree::paths() const {
  std::vector<std::vector<NodeId>> result;
  result.reserve(leaves_.size());
  for (NodeId leaf : leaves_) {
    std::vector<NodeId> path;
    std::optional<NodeId> cur = leaf;
    while (cur) {
      path.push_back(*cur);
      cur = nodes_[cur->index].parent;
    }
    std::reverse(path.begin(), path.end());
    result.push_back(std::move(path));
  }
  return result;
}

std::vector<Token> DraftTree::tokens_to(NodeId id) const {
  std::vector<Token> tokens;
  for (const DraftNode* n = &node(id); n->parent; n = &nodes_[n->parent->index]) {
    tokens.push_back(n->token);
  }
  std::reverse(tokens.begin(), tokens.end());
  return tokens;
}

void write_tree(std::ostream& out, const DraftTree& tree) {
  out << "0 - -1 0 1.0\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (const DraftNode& n : tree.nodes().subspan(1)) {
    out << n.id.index << ' ' << n.parent->index << ' ' << n.token << ' '
        << n.layer << ' ' << n.draft_prob << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

DraftTree read_tree(std::istream& in) {
  DraftTree tree;
  std::string line;
  std::size_t line_no = 0;
  bool seen_root = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split_ws(text);
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 fields `id parent token layer draft_prob`");
    }
    const auto id = detail::parse_number<std::uint32_t>(fields[0]);
    const auto token = detail::parse_number<Token>(fields[2]);
    const auto layer = detail::parse_number<int>(fields[3]);
    const auto prob = detail::parse_number<double>(fields[4]);
    if (!id || !token || !layer || !prob) {
      throw ParseError(line_no, "malformed numeric field");
    }
    if (!seen_root) {
      if (*id != 0 || fields[1] != "-" || *token != kRootToken || *layer != 0 ||
          *prob != 1.0) {
        throw ParseError(line_no, "first line must be the root `0 - -1 0 1.0`");
      }
      seen_root = true;
      continue;
    }
    const auto parent = detail::parse_number<std::uint32_t>(fields[1]);
    if (!parent) throw ParseError(line_no, "malformed parent id");
    if (*id != tree.node_count()) {
      throw ParseError(line_no, "node ids must be contiguous and ascending");
    }
    if (*parent >= *id) throw ParseError(line_no, "parent must precede child");
    if (*layer != tree.node(NodeId{*parent}).layer + 1) {
      throw ParseError(line_no, "layer must equal parent layer + 1");
    }
    try {
      tree.add_node(NodeId{*parent}, *token, *prob);
    } catch (const DomainError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!seen_root) throw ParseError(line_no, "missing root line");
  return tree;
}

}  // namespace smart
