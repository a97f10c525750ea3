#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/leafset.hpp"

namespace agreetree {

using VertexId = std::int32_t;

/// Undirected edge; stored with `a < b`.
struct Edge {
  VertexId a;
  VertexId b;

  static Edge of(VertexId x, VertexId y) { return x < y ? Edge{x, y} : Edge{y, x}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Binary unrooted phylogenetic tree: leaves have degree 1, internal vertices
/// degree 3, at least three leaves.
class UnrootedTree {
 public:
  class Builder {
   public:
    VertexId add_leaf(Label label) {
      labels_.push_back(label);
      adj_.emplace_back();
      return static_cast<VertexId>(labels_.size() - 1);
    }

    VertexId add_internal() { return add_leaf(0); }

    void connect(VertexId x, VertexId y) {
      adj_.at(x).push_back(y);
      adj_.at(y).push_back(x);
    }

    UnrootedTree build() && { return UnrootedTree(std::move(labels_), std::move(adj_)); }

   private:
    std::vector<Label> labels_;
    std::vector<std::vector<VertexId>> adj_;
  };

  std::size_t vertex_count() const noexcept { return labels_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_set_.size(); }

  bool is_leaf(VertexId v) const { return labels_[v] != 0; }
  Label label(VertexId v) const { return labels_[v]; }
  std::span<const VertexId> neighbors(VertexId v) const { return adj_[v]; }
  std::size_t degree(VertexId v) const { return adj_[v].size(); }

  /// All edges, sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(Edge e) const { return std::binary_search(edges_.begin(), edges_.end(), Edge::of(e.a, e.b)); }

  const LeafSet& leaves() const noexcept { return leaf_set_; }
  bool has_leaf(Label x) const { return leaf_index_.contains(x); }

  VertexId leaf_vertex(Label x) const {
    auto it = leaf_index_.find(x);
    if (it == leaf_index_.end()) throw PreconditionError("label " + std::to_string(x) + " is not a leaf of the tree");
    return it->second;
  }

  /// The edge joining leaf `x` to the rest of the tree.
  Edge pendant_edge(Label x) const {
    VertexId v = leaf_vertex(x);
    return Edge::of(v, adj_[v][0]);
  }

 private:
  UnrootedTree(std::vector<Label> labels, std::vector<std::vector<VertexId>> adj)
      : labels_(std::move(labels)), adj_(std::move(adj)) {
    validate();
  }

  void validate() {
    const auto n = static_cast<VertexId>(labels_.size());
    std::vector<Label> leaf_labels;
    for (VertexId v = 0; v < n; ++v) {
      const bool leaf = labels_[v] != 0;
      if (labels_[v] < 0) throw PreconditionError("leaf labels must be positive integers");
      if (leaf && adj_[v].size() != 1) throw PreconditionError("leaf " + std::to_string(labels_[v]) + " does not have degree 1");
      if (!leaf && adj_[v].size() != 3) throw PreconditionError("internal vertex without degree 3");
      for (VertexId w : adj_[v]) {
        if (w == v) throw PreconditionError("self loop");
        if (v < w) edges_.push_back(Edge{v, w});
      }
      if (leaf) {
        if (!leaf_index_.emplace(labels_[v], v).second)
          throw PreconditionError("duplicate leaf label " + std::to_string(labels_[v]));
        leaf_labels.push_back(labels_[v]);
      }
    }
    if (leaf_labels.size() < 3) throw PreconditionError("unrooted trees need at least 3 leaves");
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) throw PreconditionError("parallel edges");
    if (edges_.size() + 1 != labels_.size()) throw PreconditionError("graph is not a tree");
    std::vector<char> seen(n, 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : adj_[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    if (reached != labels_.size()) throw PreconditionError("graph is not connected");
    leaf_set_ = LeafSet(std::move(leaf_labels));
  }

  std::vector<Label> labels_;
  std::vector<std::vector<VertexId>> adj_;
  std::vector<Edge> edges_;
  std::unordered_map<Label, VertexId> leaf_index_;
  LeafSet leaf_set_;
};

}  // namespace agreetree
