#include <gtest/gtest.h>

#include <set>

#include "agreetree/agreetree.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace agreetree;

namespace {

std::set<Label> as_set(const LeafSet& x) { return {x.begin(), x.end()}; }

}  // namespace

TEST(Match1, IdenticalTreesGiveACaterpillar) {
  Match1Result r = match1(gen_balanced(3), gen_balanced(3), 0.17);
  EXPECT_TRUE(check_match1_trace(r, 0.17));
  EXPECT_TRUE(is_caterpillar(restrict(gen_balanced(3), r.leaves)));
  EXPECT_GE(r.leaves.size(), 3u);
  EXPECT_EQ(r.height, 3);
}

TEST(Match1, RejectsBadInput) {
  EXPECT_THROW(match1(gen_caterpillar_rooted(4), gen_balanced(2), 0.2), PreconditionError);
  EXPECT_THROW(match1(gen_balanced(2), gen_balanced(2), 0.5), PreconditionError);
  EXPECT_THROW(match1(gen_balanced(2), gen_balanced(3), 0.2), PreconditionError);
}

TEST(Match1, RandomInstancesMeetTheLemma) {
  Rng rng(41);
  for (int m = 1; m <= 7; ++m)
    for (int trial = 0; trial < 40; ++trial) {
      const double delta = trial % 3 == 0 ? 0.1705 : trial % 3 == 1 ? 0.05 : 0.3;
      RootedTree t1 = inst::balanced(m, inst::iota_labels(std::size_t{1} << m), rng);
      const std::size_t t = 2 + rng.below((std::size_t{1} << m) - 1);
      RootedTree t2 = inst::random_on(inst::subset(t1.leaves(), t, rng), Model::UniformTopology, rng);
      Match1Result r = match1(t1, t2, delta);
      EXPECT_TRUE(r.report.met());
      EXPECT_TRUE(check_match1_trace(r, delta));
      EXPECT_TRUE(oracle::rooted_agree(t1, t2, as_set(r.leaves)));
      EXPECT_TRUE(is_caterpillar(restrict(t1, r.leaves)));
      if (t <= 12) {
        EXPECT_LE(r.leaves.size(), oracle::mast(t1, t2));
      }
    }
}

TEST(Match2, IdenticalTreesKeepEverything) {
  Match2Result r = match2(gen_balanced(4), gen_balanced(4), 0.02);
  EXPECT_EQ(r.leaves.size(), 16u);
  auto [core, h] = balanced_core(r);
  EXPECT_EQ(h, 4);
  EXPECT_EQ(core.size(), 16u);
}

TEST(Match2, RandomPermutationsMeetTheLemma) {
  Rng rng(42);
  const double best = bounds::optimal_delta_match2().delta;
  for (int m = 1; m <= 7; ++m)
    for (int trial = 0; trial < 30; ++trial) {
      const double delta = trial % 3 == 0 ? best : trial % 3 == 1 ? 0.01 : 0.05;
      const auto labels = inst::iota_labels(std::size_t{1} << m);
      RootedTree a = inst::balanced(m, labels, rng), b = inst::balanced(m, labels, rng);
      Match2Result r = match2(a, b, delta);
      EXPECT_TRUE(r.report.met());
      EXPECT_TRUE(check_match2_trace(r, delta));
      EXPECT_TRUE(oracle::rooted_agree(a, b, as_set(r.leaves)));
      auto [core, h] = balanced_core(r);
      EXPECT_EQ(core.size(), std::size_t{1} << h);
      EXPECT_TRUE(agrees(a, b, core));
      EXPECT_EQ(classify_balanced(restrict(a, core)), BalanceClass::rooted(h));
      EXPECT_GE(h, static_cast<int>(std::floor(bounds::beta(delta) * m)));
    }
}

TEST(Match2, PartialOverlap) {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const int m1 = 2 + static_cast<int>(rng.below(4)), m2 = 2 + static_cast<int>(rng.below(4));
    const std::size_t n1 = std::size_t{1} << m1, n2 = std::size_t{1} << m2;
    // Second tree shares a random prefix of the first tree's labels.
    const std::size_t shared = 1 + rng.below(std::min(n1, n2));
    std::vector<Label> second = inst::iota_labels(shared);
    const auto extra = inst::iota_labels(n2 - shared, 1000);
    second.insert(second.end(), extra.begin(), extra.end());
    RootedTree a = inst::balanced(m1, inst::iota_labels(n1), rng), b = inst::balanced(m2, second, rng);
    Match2Result r = match2(a, b, 0.03);
    EXPECT_TRUE(r.report.met());
    EXPECT_TRUE(check_match2_trace(r, 0.03));
    EXPECT_TRUE(oracle::rooted_agree(a, b, as_set(r.leaves)));
  }
}

TEST(Match2, RejectsBadInput) {
  EXPECT_THROW(match2(gen_balanced(2), gen_caterpillar_rooted(4), 0.02), PreconditionError);
  EXPECT_THROW(match2(gen_balanced(2), gen_balanced(2), 0.3), PreconditionError);
  EXPECT_THROW(match2(gen_balanced(2), relabel(gen_balanced(2), [](Label x) { return x + 10; }), 0.02),
               PreconditionError);
}

TEST(Padding, BalancedAndContainsOriginal) {
  Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    RootedTree t = random_rooted(2 + static_cast<int>(rng.below(10)), Model::Yule, rng);
    const int target = height(t) + static_cast<int>(rng.below(3));
    RootedTree p = pad_to_balanced(t, target);
    EXPECT_EQ(classify_balanced(p), BalanceClass::rooted(target));
    EXPECT_TRUE(is_isomorphic(restrict(p, t.leaves()), t));
  }
  EXPECT_THROW(pad_to_balanced(gen_balanced(3), 2), PreconditionError);
}

TEST(Unrooted, Match1ClassesBAndC) {
  Rng rng(45);
  for (int m = 2; m <= 6; ++m)
    for (int trial = 0; trial < 20; ++trial) {
      UnrootedTree t1 = trial % 2 ? inst::class_b(m, rng) : inst::class_c(m, rng);
      UnrootedTree t2 = inst::random_unrooted_on(t1.leaves(), Model::UniformTopology, rng);
      AgreementResult r = match1_unrooted(t1, t2, 0.1705);
      EXPECT_TRUE(r.report.met()) << m;
      EXPECT_TRUE(oracle::unrooted_agree(t1, t2, as_set(r.leaves)));
    }
  EXPECT_THROW(match1_unrooted(gen_caterpillar(6), gen_caterpillar(6), 0.2), PreconditionError);
}

TEST(Unrooted, Match2ClassesBAndC) {
  Rng rng(46);
  const double delta = bounds::optimal_delta_match2().delta;
  for (int m = 1; m <= 6; ++m)
    for (int trial = 0; trial < 20; ++trial) {
      const bool b = trial % 2;
      if (b && m == 1) continue;  // B_1 has two leaves
      UnrootedTree t1 = b ? inst::class_b(m, rng) : inst::class_c(m, rng);
      UnrootedTree t2 = b ? inst::class_b(m, rng) : inst::class_c(m, rng);
      UnrootedMatch2Result r = match2_unrooted(t1, t2, delta);
      EXPECT_TRUE(r.report.met());
      EXPECT_GE(r.overlap, r.overlap_required);
      EXPECT_TRUE(oracle::unrooted_agree(t1, t2, as_set(r.leaves)));
    }
}

TEST(Multi, ThreeTreesAgree) {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto labels = inst::iota_labels(64);
    std::vector<RootedTree> ts;
    for (int i = 0; i < 3; ++i) ts.push_back(inst::balanced(6, labels, rng));
    MultiMatchResult r = match2_multi(ts, 0.02);
    EXPECT_TRUE(r.diagnostic.empty());
    ASSERT_EQ(r.stages.size(), 2u);
    for (const auto& s : r.stages) EXPECT_TRUE(s.met());
    for (const auto& t : ts) EXPECT_TRUE(agrees(ts.front(), t, r.leaves));
  }
}

TEST(AlmostBalanced, BothModes) {
  Rng rng(48);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 3 + static_cast<int>(rng.below(3));
    UnrootedTree full = inst::class_b(m, rng);
    LeafSet x = inst::subset(full.leaves(), (std::size_t{1} << m) - rng.below(3), rng);
    UnrootedTree t1 = restrict(full, x);
    UnrootedTree t2 = inst::random_unrooted_on(x, Model::UniformTopology, rng);
    const double k = 2.0;
    AlmostBalancedResult one = match_almost_balanced(t1, t2, k, bounds::alpha_k_delta(k), AlmostBalancedMode::OneTree);
    EXPECT_TRUE(one.report.met());
    EXPECT_GE(static_cast<double>(one.leaves.size()), std::ceil(std::max(1.0, one.lemma_bound) - 1e-9));
    UnrootedTree t3 = restrict(inst::class_b(m, rng), x);
    AlmostBalancedResult both =
        match_almost_balanced(t1, t3, k, bounds::beta_k_delta(k), AlmostBalancedMode::BothTrees);
    EXPECT_GE(static_cast<double>(both.leaves.size()), std::ceil(std::max(1.0, both.lemma_bound) - 1e-9));
    EXPECT_TRUE(agrees(t1, t3, both.leaves));
  }
}
