#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/generators.hpp"
#include "agreetree/leafset.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/treeops.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

struct MastResult {
  std::size_t size = 0;
  LeafSet witness;
  AgreementCertificate certificate;
};

/// Exact rooted MAST by dynamic programming over node pairs.
///
/// M(u, v) is the largest agreement set of T1^u and T2^v:
///   leaf u:  1 if its label lies below v, else 0 (symmetric for leaf v)
///   else:    max{ M(lu,lv)+M(ru,rv), M(lu,rv)+M(ru,lv),
///                 M(u,lv), M(u,rv), M(lu,v), M(ru,v) }
/// Ties go to the first option in that order. The witness is rebuilt by
/// following the recorded choices.
inline MastResult mast_rooted(const RootedTree& t1, const RootedTree& t2) {
  const std::size_t n1 = t1.node_count(), n2 = t2.node_count();
  std::vector<std::int32_t> best(n1 * n2, 0);
  std::vector<std::uint8_t> choice(n1 * n2, 0);
  auto at = [n2](NodeId u, NodeId v) { return static_cast<std::size_t>(u) * n2 + static_cast<std::size_t>(v); };

  for (NodeId u : t1.postorder()) {
    for (NodeId v : t2.postorder()) {
      const std::size_t idx = at(u, v);
      if (t1.is_leaf(u)) {
        const Label x = t1.label(u);
        best[idx] = t2.has_leaf(x) && t2.is_ancestor(v, t2.leaf_node(x)) ? 1 : 0;
        continue;
      }
      if (t2.is_leaf(v)) {
        const Label x = t2.label(v);
        best[idx] = t1.has_leaf(x) && t1.is_ancestor(u, t1.leaf_node(x)) ? 1 : 0;
        continue;
      }
      const NodeId lu = t1.left(u), ru = t1.right(u), lv = t2.left(v), rv = t2.right(v);
      const std::int32_t options[6] = {
          best[at(lu, lv)] + best[at(ru, rv)], best[at(lu, rv)] + best[at(ru, lv)],
          best[at(u, lv)], best[at(u, rv)], best[at(lu, v)], best[at(ru, v)],
      };
      std::uint8_t arg = 0;
      for (std::uint8_t k = 1; k < 6; ++k)
        if (options[k] > options[arg]) arg = k;
      best[idx] = options[arg];
      choice[idx] = arg;
    }
  }

  std::vector<Label> witness;
  std::vector<std::pair<NodeId, NodeId>> stack{{t1.root(), t2.root()}};
  while (!stack.empty()) {
    auto [u, v] = stack.back();
    stack.pop_back();
    if (best[at(u, v)] == 0) continue;
    if (t1.is_leaf(u)) {
      witness.push_back(t1.label(u));
      continue;
    }
    if (t2.is_leaf(v)) {
      witness.push_back(t2.label(v));
      continue;
    }
    const NodeId lu = t1.left(u), ru = t1.right(u), lv = t2.left(v), rv = t2.right(v);
    switch (choice[at(u, v)]) {
      case 0: stack.insert(stack.end(), {{lu, lv}, {ru, rv}}); break;
      case 1: stack.insert(stack.end(), {{lu, rv}, {ru, lv}}); break;
      case 2: stack.emplace_back(u, lv); break;
      case 3: stack.emplace_back(u, rv); break;
      case 4: stack.emplace_back(lu, v); break;
      default: stack.emplace_back(ru, v); break;
    }
  }
  MastResult r;
  r.size = static_cast<std::size_t>(best[at(t1.root(), t2.root())]);
  r.witness = LeafSet(std::move(witness));
  if (r.size > 0) r.certificate = verify_agreement(t1, t2, r.witness);
  return r;
}

/// Exact unrooted MAST.
///
/// Both trees are first restricted to their common leaves. Any agreement set
/// contains some leaf x, and rooting both trees on the pendant edge of x turns
/// unrooted agreement on sets containing x into rooted agreement; rooted
/// agreement always implies unrooted agreement. So the maximum over x of the
/// rooted MAST at those rootings is exact.
inline MastResult mast_unrooted(const UnrootedTree& t1, const UnrootedTree& t2) {
  const LeafSet common = set_intersection(t1.leaves(), t2.leaves());
  MastResult r;
  if (common.size() <= 3) {
    r.size = common.size();
    r.witness = common;
    if (!common.empty()) r.certificate = verify_agreement(t1, t2, common);
    return r;
  }
  const UnrootedTree a = common.size() == t1.leaf_count() ? t1 : restrict(t1, common);
  const UnrootedTree b = common.size() == t2.leaf_count() ? t2 : restrict(t2, common);
  for (Label x : common) {
    MastResult m = mast_rooted(root_at_edge(a, a.pendant_edge(x)), root_at_edge(b, b.pendant_edge(x)));
    if (m.size > r.size) r = std::move(m);
    if (r.size == common.size()) break;
  }
  r.certificate = verify_agreement(t1, t2, r.witness);
  return r;
}

namespace detail {

template <typename TreeT>
std::size_t mast_bruteforce_impl(const TreeT& t1, const TreeT& t2, std::size_t always_agree) {
  const LeafSet common = set_intersection(t1.leaves(), t2.leaves());
  const std::size_t n = common.size();
  if (n > 12 && guards_enabled()) throw GuardError("brute-force MAST is limited to 12 common leaves");
  if (n <= always_agree) return n;
  const auto& labels = common.labels();
  for (std::size_t size = n; size > always_agree; --size) {
    // Lexicographic walk over size-subsets via a selection mask.
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(size), 1);
    do {
      std::vector<Label> pick;
      for (std::size_t i = 0; i < n; ++i)
        if (mask[i]) pick.push_back(labels[i]);
      LeafSet x(std::move(pick));
      if (is_isomorphic(restrict(t1, x), restrict(t2, x))) return size;
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  return always_agree;
}

}  // namespace detail

/// Largest agreement set by trying every subset of the common leaves, largest
/// first. Limited to 12 common leaves.
inline std::size_t mast_bruteforce(const RootedTree& t1, const RootedTree& t2) {
  return detail::mast_bruteforce_impl(t1, t2, 2);
}

inline std::size_t mast_bruteforce(const UnrootedTree& t1, const UnrootedTree& t2) {
  return detail::mast_bruteforce_impl(t1, t2, 3);
}

/// mast(n): the smallest MAST over all pairs of topologies on leaves 1..n.
inline std::size_t mast_floor(int n, bool rooted, bool lift_guard = false) {
  if (n > 6 && !lift_guard && guards_enabled()) throw GuardError("mast_floor is limited to n <= 6");
  std::size_t low = std::numeric_limits<std::size_t>::max();
  auto sweep = [&low](const auto& trees, auto&& mast) {
    for (std::size_t i = 0; i < trees.size(); ++i)
      for (std::size_t j = i; j < trees.size(); ++j) low = std::min(low, mast(trees[i], trees[j]).size);
  };
  if (rooted) {
    sweep(enumerate_rooted(n, lift_guard), [](const RootedTree& a, const RootedTree& b) { return mast_rooted(a, b); });
  } else {
    if (n < 3) throw PreconditionError("unrooted mast_floor needs n >= 3");
    sweep(enumerate_unrooted(n, lift_guard),
          [](const UnrootedTree& a, const UnrootedTree& b) { return mast_unrooted(a, b); });
  }
  return low;
}

}  // namespace agreetree
