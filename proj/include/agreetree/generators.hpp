#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/random.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

enum class Model { UniformTopology, Yule };

struct RandomModel {
  Model model = Model::UniformTopology;
  std::uint64_t seed = 0;
};

inline std::string to_string(Model m) { return m == Model::Yule ? "yule" : "uniform"; }

/// Exhaustive routines stay small unless AGREETREE_GUARDS=off.
inline bool guards_enabled() {
  const char* v = std::getenv("AGREETREE_GUARDS");
  return !(v && std::string(v) == "off");
}

namespace detail {

/// Mutable rooted tree used while growing random or enumerated trees.
struct Draft {
  struct Node {
    int left = -1, right = -1, parent = -1;
    Label label = 0;
  };
  std::vector<Node> nodes;
  int root = -1;

  int add(Label label) {
    nodes.push_back(Node{-1, -1, -1, label});
    return static_cast<int>(nodes.size() - 1);
  }

  /// Subdivides the edge above `u` and hangs a new leaf there.
  void insert_above(int u, Label label) {
    const int w = add(0);
    const int x = add(label);
    const int p = nodes[u].parent;
    nodes[w].parent = p;
    if (p < 0) {
      root = w;
    } else if (nodes[p].left == u) {
      nodes[p].left = w;
    } else {
      nodes[p].right = w;
    }
    nodes[w].left = u;
    nodes[w].right = x;
    nodes[u].parent = w;
    nodes[x].parent = w;
  }

  /// Replaces leaf `u` by a cherry of two fresh unlabelled leaves.
  void split_leaf(int u) {
    const int a = add(0);
    const int b = add(0);
    nodes[u].left = a;
    nodes[u].right = b;
    nodes[a].parent = u;
    nodes[b].parent = u;
  }

  RootedTree build() const {
    RootedTree::Builder b;
    std::vector<NodeId> id(nodes.size(), kNoNode);
    std::vector<std::pair<int, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [u, done] = stack.back();
      stack.pop_back();
      if (nodes[u].left < 0) {
        id[u] = b.add_leaf(nodes[u].label);
      } else if (done) {
        id[u] = b.add_internal(id[nodes[u].left], id[nodes[u].right]);
      } else {
        stack.emplace_back(u, true);
        stack.emplace_back(nodes[u].right, false);
        stack.emplace_back(nodes[u].left, false);
      }
    }
    return std::move(b).build(id[root]);
  }
};

/// Mutable unrooted tree with an explicit edge list (insertion order matters
/// for reproducibility).
struct UnrootedDraft {
  std::vector<Label> labels;
  std::vector<std::pair<int, int>> edges;

  static UnrootedDraft star3() {
    UnrootedDraft d;
    d.labels = {0, 1, 2, 3};
    d.edges = {{0, 1}, {0, 2}, {0, 3}};
    return d;
  }

  /// Subdivides edge `e` with a new vertex carrying a new leaf.
  void insert_into(std::size_t e, Label label) {
    const int w = static_cast<int>(labels.size());
    labels.push_back(0);
    const int x = static_cast<int>(labels.size());
    labels.push_back(label);
    auto [a, b] = edges[e];
    edges[e] = {a, w};
    edges.emplace_back(w, b);
    edges.emplace_back(w, x);
  }

  UnrootedTree build() const {
    UnrootedTree::Builder b;
    for (Label l : labels) l ? b.add_leaf(l) : b.add_internal();
    for (auto [x, y] : edges) b.connect(x, y);
    return std::move(b).build();
  }
};

inline NodeId append_balanced(RootedTree::Builder& b, int m, const Label*& next) {
  if (m == 0) return b.add_leaf(*next++);
  NodeId l = append_balanced(b, m - 1, next);
  NodeId r = append_balanced(b, m - 1, next);
  return b.add_internal(l, r);
}

}  // namespace detail

/// Balanced tree of height m whose leaves read `order` left to right
/// (`order.size()` must be 2^m).
inline RootedTree balanced_with_order(int m, const std::vector<Label>& order) {
  if (m < 0 || m > 20) throw PreconditionError("balanced height must lie in [0, 20]");
  if (order.size() != (std::size_t{1} << m)) throw PreconditionError("leaf order length must be 2^m");
  RootedTree::Builder b;
  const Label* next = order.data();
  NodeId root = detail::append_balanced(b, m, next);
  return std::move(b).build(root);
}

/// Balanced tree of height m with leaves 1..2^m left to right.
inline RootedTree gen_balanced(int m) {
  if (m < 0 || m > 20) throw PreconditionError("balanced height must lie in [0, 20]");
  std::vector<Label> order(std::size_t{1} << m);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Label>(i + 1);
  return balanced_with_order(m, order);
}

/// Rooted caterpillar (1,(2,(...,(n-1,n)))).
inline RootedTree gen_caterpillar_rooted(int n) {
  if (n < 1) throw PreconditionError("caterpillar needs at least 1 leaf");
  RootedTree::Builder b;
  NodeId acc = b.add_leaf(n);
  for (int i = n - 1; i >= 1; --i) acc = b.add_internal(b.add_leaf(i), acc);
  return std::move(b).build(acc);
}

/// Unrooted caterpillar with leaves 1..n in spine order.
inline UnrootedTree gen_caterpillar(int n) {
  if (n < 3) throw PreconditionError("unrooted caterpillar needs at least 3 leaves");
  return unroot(gen_caterpillar_rooted(n));
}

/// Random rooted tree on leaves 1..n.
///
/// UniformTopology: leaves 2..n are inserted one at a time above a uniformly
/// chosen node (2i - 3 choices for leaf i), which is uniform over the (2n-3)!!
/// labelled topologies. Yule: a uniformly chosen leaf splits n - 1 times, then
/// labels are assigned by a uniform permutation.
inline RootedTree random_rooted(int n, Model model, Rng& rng) {
  if (n < 1) throw PreconditionError("random tree needs at least 1 leaf");
  detail::Draft d;
  if (model == Model::UniformTopology) {
    d.root = d.add(1);
    for (int i = 2; i <= n; ++i) d.insert_above(static_cast<int>(rng.below(d.nodes.size())), i);
    return d.build();
  }
  d.root = d.add(0);
  std::vector<int> leaves{d.root};
  for (int i = 1; i < n; ++i) {
    const std::size_t pick = rng.below(leaves.size());
    const int u = leaves[pick];
    d.split_leaf(u);
    leaves[pick] = d.nodes[u].left;
    leaves.push_back(d.nodes[u].right);
  }
  std::vector<Label> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i + 1;
  rng.shuffle(labels);
  for (int i = 0; i < n; ++i) d.nodes[leaves[i]].label = labels[i];
  return d.build();
}

/// Random unrooted tree on leaves 1..n (n >= 3).
///
/// UniformTopology: start from the star on {1,2,3} and insert leaf i into a
/// uniformly chosen edge (2i - 5 choices). Yule: unroot a rooted Yule tree.
inline UnrootedTree random_unrooted(int n, Model model, Rng& rng) {
  if (n < 3) throw PreconditionError("random unrooted tree needs at least 3 leaves");
  if (model == Model::Yule) return unroot(random_rooted(n, model, rng));
  auto d = detail::UnrootedDraft::star3();
  for (int i = 4; i <= n; ++i) d.insert_into(rng.below(d.edges.size()), i);
  return d.build();
}

inline UnrootedTree gen_random(int n, RandomModel m) {
  Rng rng(m.seed);
  return random_unrooted(n, m.model, rng);
}

inline RootedTree gen_random_rooted(int n, RandomModel m) {
  Rng rng(m.seed);
  return random_rooted(n, m.model, rng);
}

/// Extremal tree T(h, k): balanced of height k when h == k or k == 0, otherwise
/// T(h-1, k) on the left and T(h-1, k-1) on the right. Leaves are numbered
/// 1, 2, ... left to right.
inline RootedTree gen_extremal_fhk(int h, int k) {
  if (k < 0 || k > h || h > 40) throw PreconditionError("T(h,k) needs 0 <= k <= h");
  RootedTree::Builder b;
  Label next = 1;
  std::function<NodeId(int, int)> build = [&](int hh, int kk) -> NodeId {
    if (hh == kk || kk == 0) {
      std::vector<Label> order(std::size_t{1} << kk);
      for (auto& x : order) x = next++;
      const Label* p = order.data();
      return detail::append_balanced(b, kk, p);
    }
    NodeId l = build(hh - 1, kk);
    NodeId r = build(hh - 1, kk - 1);
    return b.add_internal(l, r);
  };
  NodeId root = build(h, k);
  return std::move(b).build(root);
}

/// swap(1..4^k): split into quarters S1 S2 S3 S4, emit swap(S1) swap(S3) swap(S2) swap(S4).
inline std::vector<Label> swap_sequence(int k) {
  if (k < 0 || k > 10) throw PreconditionError("swap sequence needs 0 <= k <= 10");
  std::function<std::vector<Label>(Label, std::size_t)> swap = [&](Label first, std::size_t len) {
    if (len == 1) return std::vector<Label>{first};
    const std::size_t q = len / 4;
    std::vector<Label> out;
    out.reserve(len);
    for (int part : {0, 2, 1, 3}) {
      auto sub = swap(first + static_cast<Label>(part * q), q);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  };
  return swap(1, std::size_t{1} << (2 * k));
}

struct RootedPair {
  RootedTree first;
  RootedTree second;
};

struct UnrootedPair {
  UnrootedTree first;
  UnrootedTree second;
};

/// Balanced trees of height 2k: leaves 1..4^k in order, and in swap order.
inline RootedPair gen_swap_pair(int k) {
  if (k < 1) throw PreconditionError("swap pair needs k >= 1");
  return RootedPair{gen_balanced(2 * k), balanced_with_order(2 * k, swap_sequence(k))};
}

/// The swap pair with both roots suppressed.
inline UnrootedPair gen_swap_pair_unrooted(int k) {
  RootedPair p = gen_swap_pair(k);
  return UnrootedPair{unroot(p.first), unroot(p.second)};
}

/// All (2n-5)!! unrooted topologies on leaves 1..n, 3 <= n <= 7.
inline std::vector<UnrootedTree> enumerate_unrooted(int n, bool lift_guard = false) {
  if (n < 3) throw PreconditionError("enumeration needs n >= 3");
  if (n > 7 && !lift_guard && guards_enabled()) throw GuardError("unrooted enumeration is limited to n <= 7");
  std::vector<detail::UnrootedDraft> level{detail::UnrootedDraft::star3()};
  for (int i = 4; i <= n; ++i) {
    std::vector<detail::UnrootedDraft> next;
    for (const auto& d : level)
      for (std::size_t e = 0; e < d.edges.size(); ++e) {
        next.push_back(d);
        next.back().insert_into(e, i);
      }
    level = std::move(next);
  }
  std::vector<UnrootedTree> out;
  out.reserve(level.size());
  for (const auto& d : level) out.push_back(d.build());
  return out;
}

/// All (2n-3)!! rooted topologies on leaves 1..n, 1 <= n <= 6.
inline std::vector<RootedTree> enumerate_rooted(int n, bool lift_guard = false) {
  if (n < 1) throw PreconditionError("enumeration needs n >= 1");
  if (n > 6 && !lift_guard && guards_enabled()) throw GuardError("rooted enumeration is limited to n <= 6");
  detail::Draft seed;
  seed.root = seed.add(1);
  std::vector<detail::Draft> level{seed};
  for (int i = 2; i <= n; ++i) {
    std::vector<detail::Draft> next;
    for (const auto& d : level)
      for (std::size_t u = 0; u < d.nodes.size(); ++u) {
        next.push_back(d);
        next.back().insert_above(static_cast<int>(u), i);
      }
    level = std::move(next);
  }
  std::vector<RootedTree> out;
  out.reserve(level.size());
  for (const auto& d : level) out.push_back(d.build());
  return out;
}

}  // namespace agreetree
