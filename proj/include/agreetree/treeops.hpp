#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/leafset.hpp"
#include "agreetree/newick.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

/// Most recent common ancestor of two nodes.
inline NodeId lca(const RootedTree& t, NodeId a, NodeId b) {
  while (!t.is_ancestor(a, b)) a = t.parent(a);
  return a;
}

/// Most recent common ancestor of a non-empty set of leaves.
inline NodeId lca(const RootedTree& t, const LeafSet& x) {
  if (x.empty()) throw PreconditionError("lca of an empty leaf set");
  NodeId acc = t.leaf_node(x.min());
  for (Label y : x) acc = lca(t, acc, t.leaf_node(y));
  return acc;
}

/// T|X, rooted at the most recent common ancestor of X. Child order is
/// inherited from `t`.
inline RootedTree restrict(const RootedTree& t, const LeafSet& x) {
  if (x.empty()) throw PreconditionError("restriction to an empty leaf set");
  if (!x.is_subset_of(t.leaves())) throw PreconditionError("restriction set is not a subset of the leaf set");
  std::vector<int> count(t.node_count(), 0);
  std::vector<NodeId> id(t.node_count(), kNoNode);
  RootedTree::Builder b;
  for (NodeId u : t.postorder()) {
    if (t.is_leaf(u)) {
      if (x.contains(t.label(u))) {
        count[u] = 1;
        id[u] = b.add_leaf(t.label(u));
      }
      continue;
    }
    const NodeId l = t.left(u), r = t.right(u);
    count[u] = count[l] + count[r];
    if (count[l] > 0 && count[r] > 0)
      id[u] = b.add_internal(id[l], id[r]);
    else
      id[u] = count[l] > 0 ? id[l] : id[r];
  }
  return std::move(b).build(id[t.root()]);
}

/// T|X for |X| >= 3.
inline UnrootedTree restrict(const UnrootedTree& t, const LeafSet& x) {
  if (x.size() < 3) throw PreconditionError("unrooted restriction needs at least 3 leaves");
  if (!x.is_subset_of(t.leaves())) throw PreconditionError("restriction set is not a subset of the leaf set");
  return unroot(restrict(root_at_edge(t, t.pendant_edge(x.min())), x));
}

/// S_l o S_r: a new root whose children are copies of the two trees.
inline RootedTree join(const RootedTree& left, const RootedTree& right) {
  if (!set_intersection(left.leaves(), right.leaves()).empty())
    throw PreconditionError("join needs disjoint leaf sets");
  RootedTree::Builder b;
  auto copy = [&b](const RootedTree& t) {
    std::vector<NodeId> id(t.node_count(), kNoNode);
    for (NodeId u : t.postorder())
      id[u] = t.is_leaf(u) ? b.add_leaf(t.label(u)) : b.add_internal(id[t.left(u)], id[t.right(u)]);
    return id[t.root()];
  };
  NodeId l = copy(left);
  NodeId r = copy(right);
  return std::move(b).build(b.add_internal(l, r));
}

/// All clusters L(t^u), sorted. There are 2n - 1 of them.
inline std::vector<LeafSet> clusters(const RootedTree& t) {
  std::vector<LeafSet> out;
  out.reserve(t.node_count());
  for (NodeId u : t.postorder()) {
    auto span = t.leaves_below(u);
    out.emplace_back(std::vector<Label>(span.begin(), span.end()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A leaf bipartition; `first` holds the tree's smallest label.
struct Split {
  LeafSet first;
  LeafSet second;

  friend bool operator==(const Split&, const Split&) = default;
  friend auto operator<=>(const Split& a, const Split& b) {
    if (auto c = a.first <=> b.first; c != 0) return c;
    return a.second <=> b.second;
  }
};

/// One split per edge, sorted: n trivial and n - 3 internal.
inline std::vector<Split> splits(const UnrootedTree& t) {
  const Label anchor = t.leaves().min();
  RootedTree r = root_at_edge(t, t.pendant_edge(anchor));
  std::vector<Split> out;
  for (NodeId u : r.postorder()) {
    if (u == r.root()) continue;
    auto span = r.leaves_below(u);
    LeafSet below(std::vector<Label>(span.begin(), span.end()));
    if (below.contains(anchor)) continue;
    out.push_back(Split{set_difference(t.leaves(), below), below});
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// First cluster of `b` (in postorder) that is not a cluster of `a`, or nothing
/// when the cluster sets coincide. Both trees must share the same leaf set.
///
/// Clusters of `a` are intervals of its left-to-right leaf order; a cluster of
/// `b` is also a cluster of `a` iff its positions in that order form one of
/// those intervals.
inline std::optional<LeafSet> first_cluster_difference(const RootedTree& a, const RootedTree& b) {
  const std::size_t n = a.leaf_count();
  std::unordered_set<std::uint64_t> intervals;
  intervals.reserve(a.node_count() * 2);
  for (NodeId u : a.postorder()) {
    auto [lo, hi] = a.leaf_range(u);
    intervals.insert(static_cast<std::uint64_t>(lo) * (n + 1) + hi);
  }
  std::vector<std::size_t> lo(b.node_count()), hi(b.node_count());
  for (NodeId v : b.postorder()) {
    if (b.is_leaf(v)) {
      lo[v] = a.leaf_position(a.leaf_node(b.label(v)));
      hi[v] = lo[v] + 1;
    } else {
      lo[v] = std::min(lo[b.left(v)], lo[b.right(v)]);
      hi[v] = std::max(hi[b.left(v)], hi[b.right(v)]);
    }
    if (hi[v] - lo[v] != b.leaf_count_below(v) ||
        !intervals.contains(static_cast<std::uint64_t>(lo[v]) * (n + 1) + hi[v])) {
      auto span = b.leaves_below(v);
      return LeafSet(std::vector<Label>(span.begin(), span.end()));
    }
  }
  return std::nullopt;
}

/// Leaf-label isomorphism: equal leaf sets and equal cluster sets.
inline bool is_isomorphic(const RootedTree& a, const RootedTree& b) {
  if (a.leaves() != b.leaves()) return false;
  return !first_cluster_difference(a, b).has_value();
}

/// Leaf-label isomorphism: equal leaf sets and equal split sets. Rooting both
/// trees at the pendant edge of the same leaf turns splits into clusters.
inline bool is_isomorphic(const UnrootedTree& a, const UnrootedTree& b) {
  if (a.leaves() != b.leaves()) return false;
  const Label x = a.leaves().min();
  return is_isomorphic(root_at_edge(a, a.pendant_edge(x)), root_at_edge(b, b.pendant_edge(x)));
}

/// S is a subtree of T: L(S) is contained in L(T) and T|L(S) is isomorphic to S.
inline bool is_subtree(const RootedTree& s, const RootedTree& t) {
  if (!s.leaves().is_subset_of(t.leaves())) return false;
  return is_isomorphic(restrict(t, s.leaves()), s);
}

inline bool is_subtree(const UnrootedTree& s, const UnrootedTree& t) {
  if (!s.leaves().is_subset_of(t.leaves())) return false;
  return is_isomorphic(restrict(t, s.leaves()), s);
}

/// Evidence that T1|X and T2|X are isomorphic: the leaves and the canonical
/// Newick of the common shape.
struct AgreementCertificate {
  LeafSet leaves;
  std::string restricted_shape;
};

namespace detail {

inline std::string small_shape(const LeafSet& x) {
  // At most two leaves (rooted) or three (unrooted): every tree on them agrees.
  if (x.size() == 1) return std::to_string(x.min()) + ";";
  std::string out = "(";
  for (Label y : x) out += std::to_string(y) + ",";
  out.back() = ')';
  return out + ";";
}

}  // namespace detail

/// Certifies that X is an agreement set of two rooted trees; throws
/// VerificationError naming a cluster of T2|X missing from T1|X otherwise.
inline AgreementCertificate verify_agreement(const RootedTree& t1, const RootedTree& t2, const LeafSet& x) {
  if (x.empty()) throw VerificationError("empty agreement set");
  if (!x.is_subset_of(t1.leaves()) || !x.is_subset_of(t2.leaves()))
    throw VerificationError("agreement set is not contained in both leaf sets");
  RootedTree r1 = restrict(t1, x);
  RootedTree r2 = restrict(t2, x);
  if (auto diff = first_cluster_difference(r1, r2))
    throw VerificationError("restrictions differ: cluster {" + to_string(*diff) + "} of the second tree is missing in the first");
  return AgreementCertificate{x, to_newick(r1)};
}

inline AgreementCertificate verify_agreement(const UnrootedTree& t1, const UnrootedTree& t2, const LeafSet& x) {
  if (x.empty()) throw VerificationError("empty agreement set");
  if (!x.is_subset_of(t1.leaves()) || !x.is_subset_of(t2.leaves()))
    throw VerificationError("agreement set is not contained in both leaf sets");
  if (x.size() <= 3) return AgreementCertificate{x, detail::small_shape(x)};
  UnrootedTree r1 = restrict(t1, x);
  UnrootedTree r2 = restrict(t2, x);
  const Label anchor = x.min();
  if (auto diff = first_cluster_difference(root_at_edge(r1, r1.pendant_edge(anchor)),
                                           root_at_edge(r2, r2.pendant_edge(anchor))))
    throw VerificationError("restrictions differ: split {" + to_string(*diff) + "} of the second tree is missing in the first");
  return AgreementCertificate{x, to_newick(r1)};
}

template <typename TreeT>
bool agrees(const TreeT& t1, const TreeT& t2, const LeafSet& x) {
  try {
    verify_agreement(t1, t2, x);
    return true;
  } catch (const VerificationError&) {
    return false;
  }
}

}  // namespace agreetree
