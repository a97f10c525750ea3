#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/leafset.hpp"

namespace agreetree {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Binary rooted phylogenetic tree with integer leaf labels.
///
/// Every internal node has exactly two ordered children. A one-leaf tree is a
/// single node that is both root and leaf. Trees are immutable once built; the
/// constructor precomputes parent links, a preorder numbering, subtree leaf
/// ranges and depths so that ancestry and membership queries are O(1).
class RootedTree {
 public:
  struct Node {
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    Label label = 0;
  };

  /// Incremental construction. Node ids returned by the builder are the ids of
  /// the finished tree.
  class Builder {
   public:
    NodeId add_leaf(Label label) {
      nodes_.push_back(Node{kNoNode, kNoNode, label});
      return static_cast<NodeId>(nodes_.size() - 1);
    }

    NodeId add_internal(NodeId left, NodeId right) {
      nodes_.push_back(Node{left, right, 0});
      return static_cast<NodeId>(nodes_.size() - 1);
    }

    std::size_t size() const noexcept { return nodes_.size(); }

    RootedTree build(NodeId root) && { return RootedTree(std::move(nodes_), root); }

   private:
    std::vector<Node> nodes_;
  };

  static RootedTree leaf(Label label) {
    Builder b;
    NodeId id = b.add_leaf(label);
    return std::move(b).build(id);
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_order_.size(); }
  NodeId root() const noexcept { return root_; }

  bool is_leaf(NodeId u) const { return nodes_[u].left == kNoNode; }
  NodeId left(NodeId u) const { return nodes_[u].left; }
  NodeId right(NodeId u) const { return nodes_[u].right; }
  NodeId parent(NodeId u) const { return parent_[u]; }
  Label label(NodeId u) const { return nodes_[u].label; }
  int depth(NodeId u) const { return depth_[u]; }

  /// Children-before-parents order.
  const std::vector<NodeId>& postorder() const noexcept { return postorder_; }

  /// Leaves in left-to-right order.
  const std::vector<Label>& leaf_order() const noexcept { return leaf_order_; }

  /// Leaves below `u`, left to right; a contiguous slice of `leaf_order()`.
  std::span<const Label> leaves_below(NodeId u) const {
    return std::span<const Label>(leaf_order_).subspan(leaf_lo_[u], leaf_hi_[u] - leaf_lo_[u]);
  }
  std::size_t leaf_count_below(NodeId u) const { return leaf_hi_[u] - leaf_lo_[u]; }
  /// Index range [lo, hi) of the leaves below `u` in `leaf_order()`.
  std::pair<std::size_t, std::size_t> leaf_range(NodeId u) const { return {leaf_lo_[u], leaf_hi_[u]}; }
  /// Position of the leaf node `u` in `leaf_order()`.
  std::size_t leaf_position(NodeId u) const { return leaf_lo_[u]; }

  Label min_label(NodeId u) const { return min_label_[u]; }

  /// True iff `a` is an ancestor of `b` or `a == b`.
  bool is_ancestor(NodeId a, NodeId b) const { return pre_[a] <= pre_[b] && pre_[b] < pre_end_[a]; }

  const LeafSet& leaves() const noexcept { return leaf_set_; }
  bool has_leaf(Label x) const { return leaf_index_.contains(x); }

  NodeId leaf_node(Label x) const {
    auto it = leaf_index_.find(x);
    if (it == leaf_index_.end()) throw PreconditionError("label " + std::to_string(x) + " is not a leaf of the tree");
    return it->second;
  }

 private:
  RootedTree(std::vector<Node> nodes, NodeId root) : nodes_(std::move(nodes)), root_(root) { index(); }

  void index() {
    const auto n = static_cast<NodeId>(nodes_.size());
    if (root_ < 0 || root_ >= n) throw PreconditionError("root id out of range");
    parent_.assign(n, kNoNode);
    std::vector<char> seen(n, 0);
    for (NodeId u = 0; u < n; ++u) {
      const Node& nd = nodes_[u];
      if ((nd.left == kNoNode) != (nd.right == kNoNode))
        throw PreconditionError("internal node with a single child");
      if (nd.left == kNoNode) {
        if (nd.label <= 0) throw PreconditionError("leaf labels must be positive integers");
        continue;
      }
      for (NodeId c : {nd.left, nd.right}) {
        if (c < 0 || c >= n || c == u) throw PreconditionError("child id out of range");
        if (parent_[c] != kNoNode) throw PreconditionError("node with two parents");
        parent_[c] = u;
      }
      if (nd.left == nd.right) throw PreconditionError("node lists the same child twice");
    }
    if (parent_[root_] != kNoNode) throw PreconditionError("root has a parent");

    pre_.assign(n, 0);
    pre_end_.assign(n, 0);
    depth_.assign(n, 0);
    leaf_lo_.assign(n, 0);
    leaf_hi_.assign(n, 0);
    min_label_.assign(n, 0);
    postorder_.clear();
    postorder_.reserve(n);
    leaf_order_.clear();

    // Iterative DFS: deep caterpillars must not overflow the call stack.
    std::vector<std::pair<NodeId, bool>> stack{{root_, false}};
    int counter = 0;
    while (!stack.empty()) {
      auto [u, done] = stack.back();
      stack.pop_back();
      if (done) {
        pre_end_[u] = counter;
        leaf_hi_[u] = leaf_order_.size();
        const Node& nd = nodes_[u];
        min_label_[u] = nd.left == kNoNode ? nd.label : std::min(min_label_[nd.left], min_label_[nd.right]);
        postorder_.push_back(u);
        continue;
      }
      if (seen[u]) throw PreconditionError("cycle in tree structure");
      seen[u] = 1;
      pre_[u] = counter++;
      leaf_lo_[u] = leaf_order_.size();
      if (parent_[u] != kNoNode) depth_[u] = depth_[parent_[u]] + 1;
      const Node& nd = nodes_[u];
      stack.emplace_back(u, true);
      if (nd.left == kNoNode) {
        leaf_order_.push_back(nd.label);
      } else {
        stack.emplace_back(nd.right, false);
        stack.emplace_back(nd.left, false);
      }
    }
    if (static_cast<NodeId>(postorder_.size()) != n) throw PreconditionError("tree has nodes unreachable from the root");

    leaf_index_.reserve(leaf_order_.size());
    for (NodeId u = 0; u < n; ++u) {
      if (nodes_[u].left != kNoNode) continue;
      if (!leaf_index_.emplace(nodes_[u].label, u).second)
        throw PreconditionError("duplicate leaf label " + std::to_string(nodes_[u].label));
    }
    leaf_set_ = LeafSet(leaf_order_);
  }

  std::vector<Node> nodes_;
  NodeId root_;
  std::vector<NodeId> parent_;
  std::vector<int> pre_, pre_end_, depth_;
  std::vector<std::size_t> leaf_lo_, leaf_hi_;
  std::vector<Label> min_label_;
  std::vector<NodeId> postorder_;
  std::vector<Label> leaf_order_;
  std::unordered_map<Label, NodeId> leaf_index_;
  LeafSet leaf_set_;
};

}  // namespace agreetree
