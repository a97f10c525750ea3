#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agreetree/bounds.hpp"
#include "agreetree/error.hpp"
#include "agreetree/exactmast.hpp"
#include "agreetree/leafset.hpp"
#include "agreetree/matchers.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/treeops.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

namespace detail {

inline std::vector<int> balanced_heights(const RootedTree& t) {
  std::vector<int> b(t.node_count(), 0);
  for (NodeId u : t.postorder()) {
    if (t.is_leaf(u)) continue;
    const int l = b[t.left(u)], r = b[t.right(u)];
    b[u] = std::max({l, r, 1 + std::min(l, r)});
  }
  return b;
}

}  // namespace detail

/// Height of the highest balanced restriction of `t`.
inline int max_balanced_height(const RootedTree& t) { return detail::balanced_heights(t)[t.root()]; }

/// 2^k leaves whose restriction is balanced of height k. Splits between both
/// children whenever that suffices, else descends into the child that can
/// still reach k (the one with the smaller label on ties).
inline LeafSet extract_balanced(const RootedTree& t, int k) {
  const std::vector<int> b = detail::balanced_heights(t);
  if (k < 0 || k > b[t.root()])
    throw PreconditionError("no balanced restriction of height " + std::to_string(k));
  std::vector<Label> out;
  std::vector<std::pair<NodeId, int>> stack{{t.root(), k}};
  while (!stack.empty()) {
    auto [u, need] = stack.back();
    stack.pop_back();
    if (need == 0) {
      out.push_back(t.min_label(u));
      continue;
    }
    const NodeId l = t.left(u), r = t.right(u);
    if (1 + std::min(b[l], b[r]) >= need) {
      stack.emplace_back(l, need - 1);
      stack.emplace_back(r, need - 1);
    } else if (b[l] >= need && (b[r] < need || t.min_label(l) < t.min_label(r))) {
      stack.emplace_back(l, need);
    } else {
      stack.emplace_back(r, need);
    }
  }
  return LeafSet(std::move(out));
}

/// A longest leaf-to-leaf path (vertex sequence) by two sweeps, starting from
/// the smallest leaf; ties go to the smaller label.
inline std::vector<VertexId> longest_path(const UnrootedTree& t) {
  auto farthest = [&t](VertexId from) {
    const std::vector<int> d = distances_from(t, from);
    VertexId best = from;
    for (Label x : t.leaves()) {
      const VertexId v = t.leaf_vertex(x);
      if (d[v] > d[best]) best = v;
    }
    return best;
  };
  const VertexId a = farthest(t.leaf_vertex(t.leaves().min()));
  const VertexId b = farthest(a);
  const std::vector<int> d = distances_from(t, b);
  std::vector<VertexId> path{a};
  while (path.back() != b) {
    for (VertexId w : t.neighbors(path.back()))
      if (d[w] == d[path.back()] - 1) {
        path.push_back(w);
        break;
      }
  }
  return path;
}

namespace detail {

inline Label smallest_leaf_away(const UnrootedTree& t, VertexId start, VertexId from) {
  Label best = 0;
  std::vector<std::pair<VertexId, VertexId>> stack{{start, from}};
  while (!stack.empty()) {
    auto [x, p] = stack.back();
    stack.pop_back();
    if (t.is_leaf(x) && (best == 0 || t.label(x) < best)) best = t.label(x);
    for (VertexId y : t.neighbors(x))
      if (y != p) stack.emplace_back(y, x);
  }
  return best;
}

}  // namespace detail

/// Leaves of a maximum caterpillar restriction, in spine order: the ends of a
/// longest path with the smallest leaf hanging off each inner path vertex.
/// The two leaves of each end cherry are interchangeable, so each end pair is
/// sorted and the lexicographically smaller direction is returned.
inline std::vector<Label> caterpillar_order(const UnrootedTree& t) {
  const std::vector<VertexId> path = longest_path(t);
  std::vector<Label> out{t.label(path.front())};
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    for (VertexId w : t.neighbors(path[i]))
      if (w != path[i - 1] && w != path[i + 1]) out.push_back(detail::smallest_leaf_away(t, w, path[i]));
  out.push_back(t.label(path.back()));
  auto normalize = [](std::vector<Label> v) {
    if (v.size() <= 3) {
      std::sort(v.begin(), v.end());
      return v;
    }
    if (v[0] > v[1]) std::swap(v[0], v[1]);
    if (v[v.size() - 2] > v.back()) std::swap(v[v.size() - 2], v.back());
    return v;
  };
  std::vector<Label> forward = normalize(out);
  std::vector<Label> backward = normalize(std::vector<Label>(out.rbegin(), out.rend()));
  return std::min(forward, backward);
}

inline LeafSet max_caterpillar(const UnrootedTree& t) { return LeafSet(caterpillar_order(t)); }

// ---------------------------------------------------------------------------
// Ramsey split

enum class RamseyKind { BalancedFound, PathFound };

inline std::string to_string(RamseyKind k) { return k == RamseyKind::BalancedFound ? "balanced" : "path"; }

struct RamseyOutcome {
  RamseyKind kind = RamseyKind::BalancedFound;
  /// Balanced restriction leaves, or the caterpillar along the path.
  LeafSet leaves;
  /// Balanced height, or path length in edges.
  int value = 0;
  double phi = 0.0;
  double path_threshold = 0.0;

  int balanced_required() const { return static_cast<int>(std::ceil(phi - bounds::kSlack)); }
  int path_required() const { return static_cast<int>(std::ceil(path_threshold - bounds::kSlack)); }
  bool met() const {
    return kind == RamseyKind::BalancedFound ? value >= balanced_required() : value >= path_required();
  }
};

namespace detail {

inline void require_split(std::size_t n, double a, double b) {
  if (n <= 2) throw PreconditionError("ramsey_split needs more than 2 leaves");
  if (!(a > 0 && a < 1 && b > 0 && b < 1) || std::abs(a + b - 1.0) > 1e-12)
    throw PreconditionError("ramsey_split needs a, b in (0,1) with a + b = 1");
}

/// Leaves of the caterpillar along a deepest root-to-leaf path.
inline LeafSet deepest_caterpillar(const RootedTree& t) {
  NodeId deep = t.leaf_node(t.leaf_order().front());
  for (Label x : t.leaf_order()) {
    const NodeId v = t.leaf_node(x);
    if (t.depth(v) > t.depth(deep) || (t.depth(v) == t.depth(deep) && x < t.label(deep))) deep = v;
  }
  std::vector<Label> out{t.label(deep)};
  for (NodeId v = deep; v != t.root(); v = t.parent(v)) {
    const NodeId p = t.parent(v);
    out.push_back(t.min_label(t.left(p) == v ? t.right(p) : t.left(p)));
  }
  return LeafSet(std::move(out));
}

}  // namespace detail

/// Balanced restriction of height >= ceil(phi(n, a)) when one exists, else the
/// caterpillar along a deepest root-to-leaf path, which then has length
/// >= ceil((log n)^psi(n, b)).
inline RamseyOutcome ramsey_split(const RootedTree& t, double a = 0.5, double b = 0.5) {
  const std::size_t n = t.leaf_count();
  detail::require_split(n, a, b);
  RamseyOutcome r;
  r.phi = bounds::phi(static_cast<double>(n), a);
  r.path_threshold = bounds::path_threshold(static_cast<double>(n), b);
  const int k = max_balanced_height(t);
  if (k >= r.balanced_required()) {
    r.kind = RamseyKind::BalancedFound;
    r.value = k;
    r.leaves = extract_balanced(t, k);
  } else {
    r.kind = RamseyKind::PathFound;
    r.value = height(t);
    r.leaves = detail::deepest_caterpillar(t);
  }
  return r;
}

/// Unrooted form: the balanced test runs on `t` rooted at the pendant edge of
/// its smallest leaf, the path is a longest path of `t`.
inline RamseyOutcome ramsey_split(const UnrootedTree& t, double a = 0.5, double b = 0.5) {
  const std::size_t n = t.leaf_count();
  detail::require_split(n, a, b);
  RamseyOutcome r = ramsey_split(detail::root_at_smallest_leaf(t), a, b);
  if (r.kind == RamseyKind::PathFound) {
    r.value = static_cast<int>(longest_path(t).size()) - 1;
    r.leaves = max_caterpillar(t);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monotone subsequences

enum class Direction { Increasing, Decreasing };

inline std::string to_string(Direction d) { return d == Direction::Increasing ? "increasing" : "decreasing"; }

struct MonotoneRun {
  std::vector<std::int64_t> values;
  Direction direction = Direction::Increasing;
};

namespace detail {

/// Longest strictly increasing subsequence by patience sorting.
inline std::vector<std::int64_t> longest_increasing(const std::vector<std::int64_t>& s) {
  std::vector<std::int64_t> tops;      // smallest tail value per length
  std::vector<std::size_t> top_index;  // index in s of that tail
  std::vector<std::ptrdiff_t> prev(s.size(), -1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(tops.begin(), tops.end(), s[i]) - tops.begin());
    if (pos > 0) prev[i] = static_cast<std::ptrdiff_t>(top_index[pos - 1]);
    if (pos == tops.size()) {
      tops.push_back(s[i]);
      top_index.push_back(i);
    } else {
      tops[pos] = s[i];
      top_index[pos] = i;
    }
  }
  std::vector<std::int64_t> out;
  for (std::ptrdiff_t i = top_index.empty() ? -1 : static_cast<std::ptrdiff_t>(top_index.back()); i >= 0; i = prev[i])
    out.push_back(s[i]);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Longest monotone subsequence of distinct values: increasing or decreasing,
/// whichever is longer, increasing on ties. Its length is at least ceil(sqrt n).
inline MonotoneRun lis(const std::vector<std::int64_t>& s) {
  std::vector<std::int64_t> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw PreconditionError("lis needs distinct values");
  MonotoneRun inc{detail::longest_increasing(s), Direction::Increasing};
  std::vector<std::int64_t> negated(s.size());
  std::transform(s.begin(), s.end(), negated.begin(), [](std::int64_t x) { return -x; });
  MonotoneRun dec{detail::longest_increasing(negated), Direction::Decreasing};
  for (auto& x : dec.values) x = -x;
  return dec.values.size() > inc.values.size() ? dec : inc;
}

// ---------------------------------------------------------------------------
// Caterpillar agreement

struct CaterpillarResult : AgreementResult {
  std::size_t lis_length = 0;
  std::size_t caterpillar_size = 0;
};

/// Agreement between a caterpillar `t1` and any `t2` on the same n >= 3
/// leaves. Guarantee: log(n) / 3.
///
///   1. read t1's leaves in spine order;
///   2. read t2's leaves in a circular planar order, cut at the first spine
///      leaf: t2 rooted at that leaf's pendant edge, children ordered by their
///      smallest spine position;
///   3. X = longest monotone run of the spine positions in that order;
///   4. Y = leaves of a maximum caterpillar of t2|X;
///   5. return an exact MAST of t1|Y and t2|Y.
inline CaterpillarResult caterpillar_agree(const UnrootedTree& t1, const UnrootedTree& t2) {
  detail::require_same_leaves(t1, t2);
  if (t1.leaf_count() < 3) throw PreconditionError("caterpillar_agree needs at least 3 leaves");
  if (!is_caterpillar(t1)) throw PreconditionError("caterpillar_agree needs a caterpillar first tree");
  const std::vector<Label> spine = caterpillar_order(t1);
  std::unordered_map<Label, std::int64_t> position;
  for (std::size_t i = 0; i < spine.size(); ++i) position[spine[i]] = static_cast<std::int64_t>(i);

  const RootedTree planar = root_at_edge(t2, t2.pendant_edge(spine.front()));
  std::vector<std::int64_t> first(planar.node_count());
  for (NodeId u : planar.postorder())
    first[u] = planar.is_leaf(u) ? position.at(planar.label(u))
                                 : std::min(first[planar.left(u)], first[planar.right(u)]);
  std::vector<std::int64_t> seq;
  seq.reserve(planar.leaf_count());
  std::vector<NodeId> stack{planar.root()};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (planar.is_leaf(u)) {
      seq.push_back(first[u]);
      continue;
    }
    NodeId a = planar.left(u), b = planar.right(u);
    if (first[b] < first[a]) std::swap(a, b);
    stack.push_back(b);
    stack.push_back(a);
  }
  const MonotoneRun run = lis(seq);

  std::vector<Label> xs;
  for (std::int64_t p : run.values) xs.push_back(spine[static_cast<std::size_t>(p)]);
  const LeafSet x(std::move(xs));
  const LeafSet y = x.size() <= 3 ? x : max_caterpillar(restrict(t2, x));

  CaterpillarResult r;
  r.lis_length = x.size();
  r.caterpillar_size = y.size();
  r.leaves = y.size() <= 3 ? y : mast_unrooted(restrict(t1, y), restrict(t2, y)).witness;
  r.certificate = verify_agreement(t1, t2, r.leaves);
  r.report = {"caterpillar", 0.0, bounds::caterpillar_bound(static_cast<double>(t1.leaf_count())), r.leaves.size()};
  return r;
}

// ---------------------------------------------------------------------------
// General trees

struct GeneralResult : AgreementResult {
  /// Which attempt produced the leaves: "first", "second", "exact" or "identical".
  std::string source;
  RamseyOutcome split;
};

namespace detail {

/// One pass of the general pipeline driven by a split of `a`.
inline LeafSet general_attempt(const UnrootedTree& a, const UnrootedTree& b, const RamseyOutcome& split,
                               double delta) {
  const LeafSet& s = split.leaves;
  if (s.size() <= 3) return s;
  if (split.kind == RamseyKind::BalancedFound) {
    const RootedTree ra = restrict(root_at_smallest_leaf(a), s);
    return match1(ra, root_at_smallest_leaf(restrict(b, s)), delta).leaves;
  }
  return caterpillar_agree(restrict(a, s), restrict(b, s)).leaves;
}

}  // namespace detail

/// Trees up to this many leaves also get an exact MAST in agree_general.
inline constexpr std::size_t kExactCutoff = 64;

/// Agreement for two arbitrary trees on the same n > 2 leaves. Guarantee:
/// (alpha*/2) sqrt(log n) + alpha* log(2/3).
///
/// A balanced split of one tree goes to Match1, a path split to
/// caterpillar_agree. Both trees take a turn as the split tree, and for
/// n <= 64 the exact MAST competes too; the largest result wins. Isomorphic
/// inputs short-cut to the full leaf set.
inline GeneralResult agree_general(const UnrootedTree& t1, const UnrootedTree& t2) {
  detail::require_same_leaves(t1, t2);
  if (t1.leaf_count() <= 2) throw PreconditionError("agree_general needs more than 2 leaves");
  const double delta = bounds::optimal_delta_match1().delta;
  GeneralResult r;
  r.split = ramsey_split(t1);
  r.leaves = detail::general_attempt(t1, t2, r.split, delta);
  r.source = "first";
  const LeafSet second = detail::general_attempt(t2, t1, ramsey_split(t2), delta);
  if (second.size() > r.leaves.size()) r.leaves = second, r.source = "second";
  if (is_isomorphic(t1, t2)) {
    r.leaves = t1.leaves();
    r.source = "identical";
  } else if (t1.leaf_count() <= kExactCutoff) {
    MastResult exact = mast_unrooted(t1, t2);
    if (exact.size > r.leaves.size()) r.leaves = exact.witness, r.source = "exact";
  }
  r.certificate = verify_agreement(t1, t2, r.leaves);
  r.report = {"agree", delta, bounds::general_bound(static_cast<double>(t1.leaf_count())), r.leaves.size()};
  return r;
}

}  // namespace agreetree
