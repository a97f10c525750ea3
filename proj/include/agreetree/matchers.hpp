#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "agreetree/bounds.hpp"
#include "agreetree/error.hpp"
#include "agreetree/generators.hpp"
#include "agreetree/leafset.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/treeops.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

/// Labels above this value are reserved for padding leaves.
inline constexpr Label kDummyBase = 1'000'000'000;
inline constexpr Label kFirstDummyT1 = kDummyBase + 1;
inline constexpr Label kFirstDummyT2 = 2 * kDummyBase + 1;

namespace detail {

/// Intersection sizes t_ab = |L(t1^a) ∩ L(t2^b)|. Leaves of t2 are mapped to
/// their position in t1's leaf order once; a query scans the leaves below b.
class Overlap {
 public:
  Overlap(const RootedTree& t1, const RootedTree& t2) : t1_(t1), t2_(t2), pos_(t2.leaf_count()) {
    const auto& order = t2.leaf_order();
    for (std::size_t i = 0; i < order.size(); ++i)
      pos_[i] = t1.has_leaf(order[i]) ? static_cast<std::int64_t>(t1.leaf_position(t1.leaf_node(order[i]))) : -1;
  }

  std::size_t count(NodeId a, NodeId b) const {
    auto [alo, ahi] = t1_.leaf_range(a);
    auto [blo, bhi] = t2_.leaf_range(b);
    std::size_t c = 0;
    for (std::size_t i = blo; i < bhi; ++i)
      if (pos_[i] >= static_cast<std::int64_t>(alo) && pos_[i] < static_cast<std::int64_t>(ahi)) ++c;
    return c;
  }

  /// Smallest label in the intersection, 0 when it is empty.
  Label smallest(NodeId a, NodeId b) const {
    auto [alo, ahi] = t1_.leaf_range(a);
    auto [blo, bhi] = t2_.leaf_range(b);
    Label best = 0;
    for (std::size_t i = blo; i < bhi; ++i) {
      if (pos_[i] < static_cast<std::int64_t>(alo) || pos_[i] >= static_cast<std::int64_t>(ahi)) continue;
      const Label x = t2_.leaf_order()[i];
      if (best == 0 || x < best) best = x;
    }
    return best;
  }

 private:
  const RootedTree& t1_;
  const RootedTree& t2_;
  std::vector<std::int64_t> pos_;
};

/// Children of u and v after the reordering step shared by both matchers:
/// afterwards lr + rl <= ll + rr and ll <= rr. Equality keeps the given order.
struct Quad {
  NodeId lu, ru, lv, rv;
  std::size_t ll, lr, rl, rr;

  void swap_second() {
    std::swap(lv, rv);
    std::swap(ll, lr);
    std::swap(rl, rr);
  }
  void swap_both() {
    std::swap(lu, ru);
    std::swap(lv, rv);
    std::swap(ll, rr);
    std::swap(lr, rl);
  }
};

inline Quad reordered_quad(const RootedTree& t1, const RootedTree& t2, const Overlap& ov, NodeId u, NodeId v) {
  Quad q{t1.left(u), t1.right(u), t2.left(v), t2.right(v), 0, 0, 0, 0};
  q.ll = ov.count(q.lu, q.lv);
  q.lr = ov.count(q.lu, q.rv);
  q.rl = ov.count(q.ru, q.lv);
  q.rr = ov.count(q.ru, q.rv);
  if (q.lr + q.rl > q.ll + q.rr) q.swap_second();
  if (q.ll > q.rr) q.swap_both();
  return q;
}

inline int require_balanced(const RootedTree& t, const char* what) {
  BalanceClass c = classify_balanced(t);
  if (c.kind != BalanceClass::Kind::RootedBalanced)
    throw PreconditionError(std::string(what) + " must be a balanced rooted tree");
  return c.m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Match1

enum class Match1Rule { Base, Case1, SkipLeft, SkipRight, Cross, Heavy };

inline std::string to_string(Match1Rule r) {
  switch (r) {
    case Match1Rule::Base: return "base";
    case Match1Rule::Case1: return "case1";
    case Match1Rule::SkipLeft: return "skip-left";
    case Match1Rule::SkipRight: return "skip-right";
    case Match1Rule::Cross: return "cross";
    case Match1Rule::Heavy: return "heavy";
  }
  return "?";
}

/// One call of Match1. `u` and `v` are the call's arguments, `t` = t_uv and
/// `emitted` the leaf added by this call (0 for none).
struct Match1Step {
  NodeId u;
  NodeId v;
  std::size_t t;
  Match1Rule rule;
  Label emitted;
};

struct Match1Result {
  LeafSet leaves;
  std::vector<Match1Step> trace;
  AgreementCertificate certificate;
  GuaranteeReport report;
  int height = 0;
};

/// Greedy caterpillar agreement between a balanced tree `t1` and a tree `t2`
/// with L(t2) ⊆ L(t1).
///
/// Rules, in listing order:
///   base        either side is a leaf: return the intersection
///   case1       t_ll > 0: emit the smallest leaf of L(lu) ∩ L(lv), go (ru, rv)
///   skip-left   t_rl = 0: go (u, rv)
///   skip-right  t_lr = 0: go (ru, v)
///   cross       t_lr + t_rl >= delta t: orient so t_lr <= t_rl, emit the
///               smallest leaf of L(lu) ∩ L(rv), go (ru, lv)
///   heavy       go (ru, rv)
/// Each call recurses at most once, so the algorithm runs as a loop.
inline Match1Result match1(const RootedTree& t1, const RootedTree& t2, double delta) {
  bounds::detail::require_open(delta, 0.0, 0.5, "delta");
  const int m = detail::require_balanced(t1, "match1 first tree");
  if (!t2.leaves().is_subset_of(t1.leaves()))
    throw PreconditionError("match1 needs the second leaf set inside the first");

  const detail::Overlap ov(t1, t2);
  Match1Result r;
  r.height = m;
  std::vector<Label> out;
  NodeId u = t1.root(), v = t2.root();
  while (true) {
    const std::size_t t = ov.count(u, v);
    if (t == 0) throw PreconditionError("match1 reached a call with an empty intersection");
    if (t1.is_leaf(u) || t2.is_leaf(v)) {
      const Label z = ov.smallest(u, v);
      out.push_back(z);
      r.trace.push_back({u, v, t, Match1Rule::Base, z});
      break;
    }
    detail::Quad q = detail::reordered_quad(t1, t2, ov, u, v);
    if (q.ll > 0) {
      const Label z = ov.smallest(q.lu, q.lv);
      out.push_back(z);
      r.trace.push_back({u, v, t, Match1Rule::Case1, z});
      u = q.ru;
      v = q.rv;
    } else if (q.rl == 0) {
      r.trace.push_back({u, v, t, Match1Rule::SkipLeft, 0});
      v = q.rv;
    } else if (q.lr == 0) {
      r.trace.push_back({u, v, t, Match1Rule::SkipRight, 0});
      u = q.ru;
    } else if (static_cast<double>(q.lr + q.rl) >= delta * static_cast<double>(t)) {
      if (q.lr > q.rl) q.swap_both();
      const Label z = ov.smallest(q.lu, q.rv);
      out.push_back(z);
      r.trace.push_back({u, v, t, Match1Rule::Cross, z});
      u = q.ru;
      v = q.lv;
    } else {
      r.trace.push_back({u, v, t, Match1Rule::Heavy, 0});
      u = q.ru;
      v = q.rv;
    }
  }
  r.leaves = LeafSet(std::move(out));
  r.certificate = verify_agreement(t1, t2, r.leaves);
  r.report = {"match1", delta, bounds::match1_bound(m, t2.leaf_count(), delta), r.leaves.size()};
  return r;
}

/// Checks the per-step lower bounds on t along a Match1 trace and their product
/// t_k >= t_0 (1/4)^a (delta/2)^d (1-delta)^e, together with |X| = a + d + 1.
inline bool check_match1_trace(const Match1Result& r, double delta) {
  const auto& tr = r.trace;
  if (tr.empty() || tr.back().rule != Match1Rule::Base) return false;
  int a = 0, d = 0, e = 0;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double ti = static_cast<double>(tr[i].t), next = static_cast<double>(tr[i + 1].t);
    switch (tr[i].rule) {
      case Match1Rule::Case1:
        ++a;
        if (next < ti / 4.0 - bounds::kSlack) return false;
        break;
      case Match1Rule::SkipLeft:
      case Match1Rule::SkipRight:
        if (tr[i + 1].t != tr[i].t) return false;
        break;
      case Match1Rule::Cross:
        ++d;
        if (next < delta * ti / 2.0 - bounds::kSlack) return false;
        break;
      case Match1Rule::Heavy:
        ++e;
        if (next <= (1.0 - delta) * ti - bounds::kSlack) return false;
        break;
      case Match1Rule::Base: return false;
    }
  }
  const double product = static_cast<double>(tr.front().t) * std::pow(0.25, a) * std::pow(delta / 2.0, d) *
                         std::pow(1.0 - delta, e);
  if (static_cast<double>(tr.back().t) < product * (1.0 - bounds::kSlack)) return false;
  return r.leaves.size() == static_cast<std::size_t>(a + d + 1);
}

// ---------------------------------------------------------------------------
// Match2

enum class Match2Rule { Base, Diagonal, Antidiagonal, BothSmall, DropFirst, DropSecond };

inline std::string to_string(Match2Rule r) {
  switch (r) {
    case Match2Rule::Base: return "base";
    case Match2Rule::Diagonal: return "diagonal";
    case Match2Rule::Antidiagonal: return "antidiagonal";
    case Match2Rule::BothSmall: return "both-small";
    case Match2Rule::DropFirst: return "drop-first";
    case Match2Rule::DropSecond: return "drop-second";
  }
  return "?";
}

inline bool is_branching(Match2Rule r) { return r == Match2Rule::Diagonal || r == Match2Rule::Antidiagonal; }

/// A vertex of the recursion tree. `parent` is -1 at the root.
struct Match2Call {
  NodeId u;
  NodeId v;
  std::size_t t;
  Match2Rule rule;
  int parent;
  std::vector<int> children;
  Label emitted;
};

struct Match2Result {
  LeafSet leaves;
  std::vector<Match2Call> calls;
  AgreementCertificate certificate;
  GuaranteeReport report;
  int m1 = 0;
  int m2 = 0;
};

namespace detail {

class Match2Engine {
 public:
  Match2Engine(const RootedTree& t1, const RootedTree& t2, double delta) : t1_(t1), t2_(t2), ov_(t1, t2), delta_(delta) {}

  int run(NodeId u, NodeId v, int parent) {
    const std::size_t t = ov_.count(u, v);
    if (t == 0) throw PreconditionError("match2 reached a call with an empty intersection");
    const int id = static_cast<int>(calls.size());
    calls.push_back({u, v, t, Match2Rule::Base, parent, {}, 0});
    if (parent >= 0) calls[parent].children.push_back(id);
    if (t1_.is_leaf(u) || t2_.is_leaf(v)) {
      calls[id].emitted = ov_.smallest(u, v);
      leaves.push_back(calls[id].emitted);
      return id;
    }
    const Quad q = reordered_quad(t1_, t2_, ov_, u, v);
    const double dt = delta_ * static_cast<double>(t);
    auto big = [dt](std::size_t x) { return static_cast<double>(x) >= dt; };
    if (big(q.ll) && big(q.rr)) {
      calls[id].rule = Match2Rule::Diagonal;
      run(q.lu, q.lv, id);
      run(q.ru, q.rv, id);
    } else if (big(q.lr) && big(q.rl)) {
      calls[id].rule = Match2Rule::Antidiagonal;
      run(q.lu, q.rv, id);
      run(q.ru, q.lv, id);
    } else if (!big(q.lr) && !big(q.rl)) {
      calls[id].rule = Match2Rule::BothSmall;
      run(q.ru, q.rv, id);
    } else if (big(q.rl)) {
      calls[id].rule = Match2Rule::DropFirst;
      run(q.ru, v, id);
    } else {
      calls[id].rule = Match2Rule::DropSecond;
      run(u, q.rv, id);
    }
    return id;
  }

  std::vector<Match2Call> calls;
  std::vector<Label> leaves;

 private:
  const RootedTree& t1_;
  const RootedTree& t2_;
  Overlap ov_;
  double delta_;
};

}  // namespace detail

/// Greedy balanced agreement between two balanced trees.
///
/// Rules, in listing order (after the same reordering as Match1):
///   base          either side is a leaf: return the intersection
///   diagonal      t_ll, t_rr >= delta t: union of (lu, lv) and (ru, rv)
///   antidiagonal  t_lr, t_rl >= delta t: union of (lu, rv) and (ru, lv)
///   both-small    t_lr, t_rl < delta t: go (ru, rv)
///   drop-first    only t_rl >= delta t: go (ru, v)
///   drop-second   only t_lr >= delta t: go (u, rv)
inline Match2Result match2(const RootedTree& t1, const RootedTree& t2, double delta) {
  bounds::detail::require_open(delta, 0.0, 0.25, "delta");
  Match2Result r;
  r.m1 = detail::require_balanced(t1, "match2 first tree");
  r.m2 = detail::require_balanced(t2, "match2 second tree");
  const std::size_t t = set_intersection(t1.leaves(), t2.leaves()).size();
  if (t == 0) throw PreconditionError("match2 needs a common leaf");
  detail::Match2Engine engine(t1, t2, delta);
  engine.run(t1.root(), t2.root(), -1);
  r.calls = std::move(engine.calls);
  r.leaves = LeafSet(std::move(engine.leaves));
  r.certificate = verify_agreement(t1, t2, r.leaves);
  r.report = {"match2", delta, bounds::match2_bound(r.m1, r.m2, t, delta), r.leaves.size()};
  return r;
}

/// Checks the per-step drop bounds along every root-to-leaf path of the call
/// tree, and that no path is longer than m1 + m2.
inline bool check_match2_trace(const Match2Result& r, double delta) {
  std::vector<int> depth(r.calls.size(), 0);
  for (std::size_t i = 0; i < r.calls.size(); ++i) {
    const Match2Call& c = r.calls[i];
    if (c.parent < 0) continue;
    const Match2Call& p = r.calls[c.parent];
    depth[i] = depth[c.parent] + 1;
    if (depth[i] > r.m1 + r.m2) return false;
    double factor = 0.0;
    switch (p.rule) {
      case Match2Rule::Diagonal:
      case Match2Rule::Antidiagonal: factor = delta; break;
      case Match2Rule::BothSmall: factor = 1.0 - 3.0 * delta; break;
      case Match2Rule::DropFirst:
      case Match2Rule::DropSecond: factor = 1.0 - 2.0 * delta; break;
      case Match2Rule::Base: return false;
    }
    if (static_cast<double>(c.t) < factor * static_cast<double>(p.t) - bounds::kSlack) return false;
  }
  return true;
}

/// Balanced agreement inside a Match2 result: with h the fewest branching
/// calls on any root-to-leaf path, one leaf (the smallest) below each call
/// reached after exactly h branchings. Returns the 2^h leaves and h.
inline std::pair<LeafSet, int> balanced_core(const Match2Result& r) {
  const auto& calls = r.calls;
  if (calls.empty()) return {LeafSet{}, 0};
  // Fewest branchings below each call, and smallest emitted leaf below it.
  std::vector<int> below(calls.size(), 0);
  std::vector<Label> smallest(calls.size(), 0);
  for (std::size_t i = calls.size(); i-- > 0;) {
    const Match2Call& c = calls[i];
    if (c.children.empty()) {
      smallest[i] = c.emitted;
      continue;
    }
    int b = std::numeric_limits<int>::max();
    Label s = 0;
    for (int ch : c.children) {
      b = std::min(b, below[ch]);
      if (s == 0 || smallest[ch] < s) s = smallest[ch];
    }
    below[i] = b + (is_branching(c.rule) ? 1 : 0);
    smallest[i] = s;
  }
  const int h = below[0];
  std::vector<Label> pick;
  std::vector<std::pair<int, int>> stack{{0, h}};
  while (!stack.empty()) {
    auto [i, left] = stack.back();
    stack.pop_back();
    const Match2Call& c = calls[i];
    if (left == 0) {
      pick.push_back(smallest[i]);
    } else if (is_branching(c.rule)) {
      for (int ch : c.children) stack.emplace_back(ch, left - 1);
    } else {
      stack.emplace_back(c.children.front(), left);
    }
  }
  return {LeafSet(std::move(pick)), h};
}

// ---------------------------------------------------------------------------
// Padding

/// A balanced tree of the given height containing `t` as a restriction. Each
/// leaf at depth d becomes the leftmost leaf of a balanced subtree of height
/// target - d whose other leaves are numbered upward from `first_dummy`.
inline RootedTree pad_to_balanced(const RootedTree& t, int target, Label first_dummy = kFirstDummyT1) {
  const int h = height(t);
  if (target < h) throw PreconditionError("padding target " + std::to_string(target) + " is below the tree height " +
                                          std::to_string(h));
  if (target > 22) throw PreconditionError("padding target must not exceed 22");
  RootedTree::Builder b;
  Label next = first_dummy;
  auto grow = [&b, &next](Label x, int depth_left) {
    // Leftmost spine keeps x; every right sibling is a full balanced block.
    NodeId acc = b.add_leaf(x);
    for (int level = 0; level < depth_left; ++level) {
      std::vector<Label> order(std::size_t{1} << level);
      for (Label& y : order) y = next++;
      const Label* p = order.data();
      NodeId block = detail::append_balanced(b, level, p);
      acc = b.add_internal(acc, block);
    }
    return acc;
  };
  std::vector<NodeId> id(t.node_count(), kNoNode);
  for (NodeId u : t.postorder())
    id[u] = t.is_leaf(u) ? grow(t.label(u), target - t.depth(u)) : b.add_internal(id[t.left(u)], id[t.right(u)]);
  return std::move(b).build(id[t.root()]);
}

// ---------------------------------------------------------------------------
// Unrooted wrappers

/// Result of a matcher on unrooted (or several) trees.
struct AgreementResult {
  LeafSet leaves;
  AgreementCertificate certificate;
  GuaranteeReport report;
};

namespace detail {

struct Branch {
  VertexId start;
  LeafSet leaves;
};

/// The branches hanging off vertex c, ordered by smallest label.
inline std::vector<Branch> branches_at(const UnrootedTree& t, VertexId c) {
  std::vector<Branch> out;
  for (VertexId w : t.neighbors(c)) {
    std::vector<Label> found;
    std::vector<std::pair<VertexId, VertexId>> stack{{w, c}};
    while (!stack.empty()) {
      auto [x, from] = stack.back();
      stack.pop_back();
      if (t.is_leaf(x)) found.push_back(t.label(x));
      for (VertexId y : t.neighbors(x))
        if (y != from) stack.emplace_back(y, x);
    }
    out.push_back({w, LeafSet(std::move(found))});
  }
  std::sort(out.begin(), out.end(), [](const Branch& a, const Branch& b) { return a.leaves.min() < b.leaves.min(); });
  return out;
}

/// Roots `t` at vertex c after deleting the branch that starts at `drop`.
inline RootedTree root_at_vertex_without(const UnrootedTree& t, VertexId c, VertexId drop) {
  RootedTree::Builder b;
  std::vector<std::pair<Label, NodeId>> kids;
  for (VertexId w : t.neighbors(c)) {
    if (w == drop) continue;
    auto [id, low] = append_branch(t, w, c, b);
    kids.emplace_back(low, id);
  }
  if (kids.size() != 2) throw PreconditionError("center must have degree 3");
  std::sort(kids.begin(), kids.end());
  NodeId root = b.add_internal(kids[0].second, kids[1].second);
  return std::move(b).build(root);
}

inline RootedTree root_at_smallest_leaf(const UnrootedTree& t) { return root_at_edge(t, t.pendant_edge(t.leaves().min())); }

inline void require_same_leaves(const UnrootedTree& a, const UnrootedTree& b) {
  if (a.leaves() != b.leaves()) throw PreconditionError("trees must share the same leaf set");
}

}  // namespace detail

/// Subdivides the central edge, or for a single center the edge from the
/// center toward the smallest leaf, and roots there.
inline RootedTree root_near_center(const UnrootedTree& t) {
  const std::vector<VertexId> c = center(t);
  if (c.size() == 2) return root_at_edge(t, Edge::of(c[0], c[1]));
  const std::vector<int> dist = distances_from(t, t.leaf_vertex(t.leaves().min()));
  for (VertexId w : t.neighbors(c[0]))
    if (dist[w] < dist[c[0]]) return root_at_edge(t, Edge::of(c[0], w));
  throw PreconditionError("center has no neighbour toward the smallest leaf");
}

/// Match1 for a balanced unrooted `t1` (class B or C) against any `t2` on the
/// same leaves. Guarantee: alpha(delta) log(2n/3).
///
/// Class B: `t1` is rooted on its central edge and `t2` on the pendant edge of
/// its smallest leaf. Class C: the center branch of `t1` with the largest
/// smallest label is dropped first and `t2` is restricted to what remains.
inline AgreementResult match1_unrooted(const UnrootedTree& t1, const UnrootedTree& t2, double delta) {
  detail::require_same_leaves(t1, t2);
  const BalanceClass cls = classify_balanced(t1);
  if (cls.kind != BalanceClass::Kind::ClassB && cls.kind != BalanceClass::Kind::ClassC)
    throw PreconditionError("match1_unrooted needs a balanced first tree");
  const double n = static_cast<double>(t1.leaf_count());
  AgreementResult r;
  const double bound = bounds::alpha(delta) * std::log2(2.0 * n / 3.0);
  if (t1.leaf_count() == 3) {
    r.leaves = t1.leaves();
  } else if (cls.kind == BalanceClass::Kind::ClassB) {
    const std::vector<VertexId> c = center(t1);
    r.leaves = match1(root_at_edge(t1, Edge::of(c[0], c[1])), detail::root_at_smallest_leaf(t2), delta).leaves;
  } else {
    const VertexId c = center(t1).front();
    const std::vector<detail::Branch> br = detail::branches_at(t1, c);
    const LeafSet x = set_difference(t1.leaves(), br.back().leaves);
    r.leaves = match1(detail::root_at_vertex_without(t1, c, br.back().start),
                      detail::root_at_smallest_leaf(restrict(t2, x)), delta)
                   .leaves;
  }
  r.certificate = verify_agreement(t1, t2, r.leaves);
  r.report = {"match1-unrooted", delta, bound, r.leaves.size()};
  return r;
}

struct UnrootedMatch2Result : AgreementResult {
  /// |X ∩ Y| for class C inputs (the full leaf count for class B).
  std::size_t overlap = 0;
  /// ceil(2^(m+1)/3) for class C, 0 otherwise.
  std::size_t overlap_required = 0;
  int m = 0;
};

/// Match2 for two balanced unrooted trees of the same class and height m.
/// Guarantee: 2^(beta m - c).
///
/// Class B: both trees are rooted on their central edges. Class C: one center
/// branch is deleted from each tree, the pair chosen (first in smallest-label
/// order) to maximize the common leaves X ∩ Y, and Match2 runs on the two
/// pruned trees rooted at their centers.
inline UnrootedMatch2Result match2_unrooted(const UnrootedTree& t1, const UnrootedTree& t2, double delta) {
  bounds::detail::require_open(delta, 0.0, bounds::match2_delta_limit(), "delta");
  detail::require_same_leaves(t1, t2);
  const BalanceClass c1 = classify_balanced(t1), c2 = classify_balanced(t2);
  if (!(c1 == c2) || (c1.kind != BalanceClass::Kind::ClassB && c1.kind != BalanceClass::Kind::ClassC))
    throw PreconditionError("match2_unrooted needs two balanced trees of the same class and height");
  UnrootedMatch2Result r;
  r.m = c1.m;
  if (t1.leaf_count() == 3) {
    r.leaves = t1.leaves();
    r.overlap = 3;
    r.overlap_required = 2;
  } else if (c1.kind == BalanceClass::Kind::ClassB) {
    const std::vector<VertexId> a = center(t1), b = center(t2);
    r.leaves = match2(root_at_edge(t1, Edge::of(a[0], a[1])), root_at_edge(t2, Edge::of(b[0], b[1])), delta).leaves;
    r.overlap = t1.leaf_count();
  } else {
    const VertexId a = center(t1).front(), b = center(t2).front();
    const std::vector<detail::Branch> b1 = detail::branches_at(t1, a), b2 = detail::branches_at(t2, b);
    std::size_t best_i = 0, best_j = 0, best = 0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t common = set_intersection(set_difference(t1.leaves(), b1[i].leaves),
                                                    set_difference(t2.leaves(), b2[j].leaves))
                                       .size();
        if (common > best) best = common, best_i = i, best_j = j;
      }
    r.overlap = best;
    r.overlap_required = static_cast<std::size_t>(std::ceil(std::exp2(r.m + 1) / 3.0 - bounds::kSlack));
    r.leaves = match2(detail::root_at_vertex_without(t1, a, b1[best_i].start),
                      detail::root_at_vertex_without(t2, b, b2[best_j].start), delta)
                   .leaves;
  }
  r.certificate = verify_agreement(t1, t2, r.leaves);
  r.report = {"match2-unrooted", delta, bounds::match2_unrooted_bound(r.m, delta), r.leaves.size()};
  return r;
}

// ---------------------------------------------------------------------------
// Several trees

struct MultiMatchResult {
  LeafSet leaves;
  /// One report per Match2 stage, with that stage's lemma bound.
  std::vector<GuaranteeReport> stages;
  /// Heights of the balanced cores carried between stages.
  std::vector<int> core_heights;
  /// 2^(beta^2 m): the two-stage composition, informational only.
  double composed_bound = 0.0;
  /// Empty unless a stage could not run.
  std::string diagnostic;
};

/// Runs Match2 on the first two trees, keeps the balanced core of the result,
/// runs Match2 on that core against the next tree, and so on. The final stage's
/// leaves agree on every input tree.
inline MultiMatchResult match2_multi(const std::vector<RootedTree>& trees, double delta) {
  if (trees.size() < 2) throw PreconditionError("match2_multi needs at least two trees");
  const int m = detail::require_balanced(trees.front(), "match2_multi input");
  for (const RootedTree& t : trees)
    if (detail::require_balanced(t, "match2_multi input") != m)
      throw PreconditionError("match2_multi inputs must share one height");
  MultiMatchResult r;
  const double b = bounds::beta(delta);
  r.composed_bound = std::exp2(b * b * m);
  RootedTree current = trees.front();
  for (std::size_t i = 1; i < trees.size(); ++i) {
    if (set_intersection(current.leaves(), trees[i].leaves()).empty()) {
      r.diagnostic = "stage " + std::to_string(i) + " has no common leaves";
      break;
    }
    Match2Result stage = match2(current, trees[i], delta);
    r.stages.push_back(stage.report);
    r.leaves = stage.leaves;
    if (i + 1 < trees.size()) {
      auto [core, h] = balanced_core(stage);
      r.core_heights.push_back(h);
      current = restrict(current, core);
    }
  }
  for (const RootedTree& t : trees)
    if (r.leaves.size() > 0) verify_agreement(trees.front(), t, r.leaves);
  return r;
}

// ---------------------------------------------------------------------------
// Almost balanced trees

enum class AlmostBalancedMode { OneTree, BothTrees };

struct AlmostBalancedResult : AgreementResult {
  /// Bound from the matcher's own lemma at the padded heights.
  double lemma_bound = 0.0;
  int padded_height_1 = 0;
  int padded_height_2 = 0;
};

/// Agreement for trees of small radius on the same n leaves.
///
/// OneTree (radius(t1) <= k log n - 1): `t1` is rooted near its center and
/// padded to a balanced tree of height floor(k log n), `t2` is rooted at the
/// pendant edge of its smallest leaf, then Match1. Guarantee alpha_k log n.
///
/// BothTrees (both radii <= k log n): both are rooted near their centers and
/// padded to balanced trees of their own height, then Match2. Guarantee
/// n^beta_k.
///
/// Padding leaves occur in one tree only, so they never reach the output.
inline AlmostBalancedResult match_almost_balanced(const UnrootedTree& t1, const UnrootedTree& t2, double k,
                                                  double delta, AlmostBalancedMode mode) {
  detail::require_same_leaves(t1, t2);
  if (!(k > 0)) throw PreconditionError("k must be positive");
  const double n = static_cast<double>(t1.leaf_count());
  const double klog = k * std::log2(n);
  AlmostBalancedResult r;
  if (mode == AlmostBalancedMode::OneTree) {
    if (radius(t1) > klog - 1.0 + bounds::kSlack)
      throw PreconditionError("first tree radius exceeds k log n - 1");
    const RootedTree r1 = root_near_center(t1);
    r.padded_height_1 = static_cast<int>(std::floor(klog + bounds::kSlack));
    const Match1Result m = match1(pad_to_balanced(r1, r.padded_height_1, kFirstDummyT1),
                                  detail::root_at_smallest_leaf(t2), delta);
    r.leaves = m.leaves;
    r.lemma_bound = m.report.bound_value;
    r.report = {"match-ab-one", delta, bounds::alpha_k(k, delta) * std::log2(n), r.leaves.size()};
  } else {
    if (radius(t1) > klog + bounds::kSlack || radius(t2) > klog + bounds::kSlack)
      throw PreconditionError("tree radius exceeds k log n");
    const RootedTree r1 = root_near_center(t1), r2 = root_near_center(t2);
    r.padded_height_1 = height(r1);
    r.padded_height_2 = height(r2);
    const Match2Result m = match2(pad_to_balanced(r1, r.padded_height_1, kFirstDummyT1),
                                  pad_to_balanced(r2, r.padded_height_2, kFirstDummyT2), delta);
    r.leaves = m.leaves;
    r.lemma_bound = m.report.bound_value;
    r.report = {"match-ab-both", delta, std::pow(n, bounds::beta_k(k, delta)), r.leaves.size()};
  }
  r.certificate = verify_agreement(t1, t2, r.leaves);
  return r;
}

}  // namespace agreetree
