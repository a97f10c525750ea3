#pragma once

#include <algorithm>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

/// Balanced-tree classes. `RootedBalanced(m)` and `ClassB(m)` have 2^m leaves,
/// `ClassC(m)` has 3 * 2^(m-1).
struct BalanceClass {
  enum class Kind { RootedBalanced, ClassB, ClassC, NotBalanced };

  Kind kind = Kind::NotBalanced;
  int m = 0;

  static BalanceClass rooted(int m) { return {Kind::RootedBalanced, m}; }
  static BalanceClass class_b(int m) { return {Kind::ClassB, m}; }
  static BalanceClass class_c(int m) { return {Kind::ClassC, m}; }
  static BalanceClass none() { return {}; }

  friend bool operator==(const BalanceClass& a, const BalanceClass& b) {
    return a.kind == b.kind && (a.kind == Kind::NotBalanced || a.m == b.m);
  }
};

inline std::string to_string(const BalanceClass& c) {
  switch (c.kind) {
    case BalanceClass::Kind::RootedBalanced: return "RootedBalanced(" + std::to_string(c.m) + ")";
    case BalanceClass::Kind::ClassB: return "ClassB(" + std::to_string(c.m) + ")";
    case BalanceClass::Kind::ClassC: return "ClassC(" + std::to_string(c.m) + ")";
    case BalanceClass::Kind::NotBalanced: break;
  }
  return "NotBalanced";
}

/// Longest root-to-leaf distance in edges.
inline int height(const RootedTree& t) {
  int h = 0;
  for (Label x : t.leaf_order()) h = std::max(h, t.depth(t.leaf_node(x)));
  return h;
}

/// Breadth-first distances from `source`.
inline std::vector<int> distances_from(const UnrootedTree& t, VertexId source) {
  std::vector<int> dist(t.vertex_count(), -1);
  std::queue<VertexId> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (VertexId w : t.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

/// Eccentricity of every vertex. In a tree the farthest vertex from anywhere is
/// an endpoint of a diameter, so two extra sweeps suffice.
inline std::vector<int> eccentricities(const UnrootedTree& t) {
  auto far = [](const std::vector<int>& d) {
    return static_cast<VertexId>(std::max_element(d.begin(), d.end()) - d.begin());
  };
  VertexId a = far(distances_from(t, 0));
  std::vector<int> da = distances_from(t, a);
  VertexId b = far(da);
  std::vector<int> db = distances_from(t, b);
  std::vector<int> ecc(t.vertex_count());
  for (std::size_t v = 0; v < ecc.size(); ++v) ecc[v] = std::max(da[v], db[v]);
  return ecc;
}

/// One vertex, or two adjacent vertices (sorted by id).
inline std::vector<VertexId> center(const UnrootedTree& t) {
  std::vector<int> ecc = eccentricities(t);
  int best = *std::min_element(ecc.begin(), ecc.end());
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < ecc.size(); ++v)
    if (ecc[v] == best) out.push_back(static_cast<VertexId>(v));
  return out;
}

inline int radius(const UnrootedTree& t) {
  std::vector<int> ecc = eccentricities(t);
  return *std::min_element(ecc.begin(), ecc.end());
}

inline BalanceClass classify_balanced(const RootedTree& t) {
  const int d = t.depth(t.leaf_node(t.leaf_order().front()));
  for (Label x : t.leaf_order())
    if (t.depth(t.leaf_node(x)) != d) return BalanceClass::none();
  return BalanceClass::rooted(d);
}

inline BalanceClass classify_balanced(const UnrootedTree& t) {
  std::vector<VertexId> c = center(t);
  std::vector<int> dist = distances_from(t, c[0]);
  if (c.size() == 2) {
    std::vector<int> d2 = distances_from(t, c[1]);
    for (std::size_t v = 0; v < dist.size(); ++v) dist[v] = std::min(dist[v], d2[v]);
  }
  int m = -1;
  for (Label x : t.leaves()) {
    int d = dist[t.leaf_vertex(x)];
    if (m < 0) m = d;
    if (d != m) return BalanceClass::none();
  }
  return c.size() == 1 ? BalanceClass::class_c(m) : BalanceClass::class_b(m + 1);
}

/// Removing the leaves leaves a path.
inline bool is_caterpillar(const UnrootedTree& t) {
  for (VertexId v = 0; v < static_cast<VertexId>(t.vertex_count()); ++v) {
    if (t.is_leaf(v)) continue;
    int internal = 0;
    for (VertexId w : t.neighbors(v)) internal += t.is_leaf(w) ? 0 : 1;
    if (internal > 2) return false;
  }
  return true;
}

/// Rooted variant: the internal nodes (root included) induce a path, i.e. no
/// node other than the root has two internal children, and the root has at
/// most two internal children.
inline bool is_caterpillar(const RootedTree& t) {
  for (NodeId u : t.postorder()) {
    if (t.is_leaf(u) || u == t.root()) continue;
    if (!t.is_leaf(t.left(u)) && !t.is_leaf(t.right(u))) return false;
  }
  return true;
}

namespace detail {

/// Copies the component of `t` that contains `start` once the edge to `from` is
/// cut, as a rooted subtree hanging at `start`. Children are ordered by
/// smallest leaf label. Returns the new node id and the branch's smallest label.
inline std::pair<NodeId, Label> append_branch(const UnrootedTree& t, VertexId start, VertexId from,
                                              RootedTree::Builder& b) {
  struct Frame {
    VertexId v, parent;
    bool expanded;
  };
  std::vector<NodeId> id(t.vertex_count(), kNoNode);
  std::vector<Label> min_label(t.vertex_count(), 0);
  std::vector<Frame> stack{{start, from, false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (t.is_leaf(f.v)) {
      id[f.v] = b.add_leaf(t.label(f.v));
      min_label[f.v] = t.label(f.v);
      continue;
    }
    VertexId kids[2];
    int k = 0;
    for (VertexId w : t.neighbors(f.v))
      if (w != f.parent && k < 2) kids[k++] = w;
    if (k != 2) throw PreconditionError("branch start must not be a leaf adjacent only to the cut edge");
    if (!f.expanded) {
      stack.push_back({f.v, f.parent, true});
      stack.push_back({kids[1], f.v, false});
      stack.push_back({kids[0], f.v, false});
      continue;
    }
    if (min_label[kids[1]] < min_label[kids[0]]) std::swap(kids[0], kids[1]);
    id[f.v] = b.add_internal(id[kids[0]], id[kids[1]]);
    min_label[f.v] = min_label[kids[0]];
  }
  return {id[start], min_label[start]};
}

}  // namespace detail

/// Subdivides `e` with a new degree-2 root. The side with the smaller minimum
/// label becomes the left child.
inline RootedTree root_at_edge(const UnrootedTree& t, Edge e) {
  if (!t.has_edge(e)) throw PreconditionError("edge is not in the tree");
  RootedTree::Builder b;
  auto [x, min_x] = detail::append_branch(t, e.a, e.b, b);
  auto [y, min_y] = detail::append_branch(t, e.b, e.a, b);
  if (min_y < min_x) std::swap(x, y);
  NodeId root = b.add_internal(x, y);
  return std::move(b).build(root);
}

/// Suppresses the degree-2 root.
inline UnrootedTree unroot(const RootedTree& t) {
  if (t.leaf_count() < 3) throw PreconditionError("unroot needs at least 3 leaves");
  UnrootedTree::Builder b;
  std::vector<VertexId> vid(t.node_count(), -1);
  for (NodeId u : t.postorder()) {
    if (u == t.root()) continue;
    vid[u] = t.is_leaf(u) ? b.add_leaf(t.label(u)) : b.add_internal();
  }
  for (NodeId u : t.postorder()) {
    if (u == t.root() || t.is_leaf(u)) continue;
    b.connect(vid[u], vid[t.left(u)]);
    b.connect(vid[u], vid[t.right(u)]);
  }
  b.connect(vid[t.left(t.root())], vid[t.right(t.root())]);
  return std::move(b).build();
}

/// Same topology with every leaf label `x` replaced by `f(x)`.
inline RootedTree relabel(const RootedTree& t, const std::function<Label(Label)>& f) {
  RootedTree::Builder b;
  std::vector<NodeId> id(t.node_count(), kNoNode);
  for (NodeId u : t.postorder())
    id[u] = t.is_leaf(u) ? b.add_leaf(f(t.label(u))) : b.add_internal(id[t.left(u)], id[t.right(u)]);
  return std::move(b).build(id[t.root()]);
}

inline UnrootedTree relabel(const UnrootedTree& t, const std::function<Label(Label)>& f) {
  UnrootedTree::Builder b;
  for (VertexId v = 0; v < static_cast<VertexId>(t.vertex_count()); ++v)
    t.is_leaf(v) ? b.add_leaf(f(t.label(v))) : b.add_internal();
  for (const Edge& e : t.edges()) b.connect(e.a, e.b);
  return std::move(b).build();
}

}  // namespace agreetree
