#include <gtest/gtest.h>

#include "agreetree/agreetree.hpp"
#include "oracles.hpp"

using namespace agreetree;

TEST(MastRooted, SmallCases) {
  EXPECT_EQ(mast_rooted(parse_rooted("((1,2),3);"), parse_rooted("((1,3),2);")).size, 2u);
  EXPECT_EQ(mast_rooted(gen_balanced(3), gen_balanced(3)).size, 8u);
  EXPECT_EQ(mast_rooted(parse_rooted("1;"), parse_rooted("1;")).size, 1u);
  EXPECT_EQ(mast_rooted(parse_rooted("(1,2);"), parse_rooted("(3,4);")).size, 0u);
}

TEST(MastRooted, MatchesOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    RootedTree a = random_rooted(n, Model::UniformTopology, rng), b = random_rooted(n, Model::Yule, rng);
    MastResult r = mast_rooted(a, b);
    EXPECT_EQ(r.size, oracle::mast(a, b));
    EXPECT_EQ(r.size, mast_bruteforce(a, b));
    EXPECT_EQ(r.witness.size(), r.size);
    EXPECT_TRUE(agrees(a, b, r.witness));
  }
}

TEST(MastRooted, PartialOverlap) {
  RootedTree a = parse_rooted("(((1,2),3),(4,9));"), b = parse_rooted("((1,(2,3)),(7,4));");
  MastResult r = mast_rooted(a, b);
  EXPECT_EQ(r.size, oracle::mast(a, b));
  EXPECT_TRUE(r.witness.is_subset_of(LeafSet{1, 2, 3, 4}));
}

TEST(MastUnrooted, MatchesOracle) {
  Rng rng(32);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6));
    UnrootedTree a = random_unrooted(n, Model::UniformTopology, rng), b = random_unrooted(n, Model::UniformTopology, rng);
    MastResult r = mast_unrooted(a, b);
    EXPECT_EQ(r.size, oracle::mast(a, b));
    EXPECT_EQ(r.size, mast_bruteforce(a, b));
    EXPECT_TRUE(agrees(a, b, r.witness));
  }
}

TEST(MastUnrooted, Deterministic) {
  UnrootedTree a = gen_random(20, {Model::UniformTopology, 4}), b = gen_random(20, {Model::UniformTopology, 5});
  EXPECT_EQ(mast_unrooted(a, b).witness, mast_unrooted(a, b).witness);
}

TEST(Bruteforce, Guard) {
  EXPECT_THROW(mast_bruteforce(gen_caterpillar(13), gen_caterpillar(13)), GuardError);
}

TEST(MastFloor, SmallValues) {
  // Unrooted values from the enumeration oracle, frozen after first derivation.
  EXPECT_EQ(mast_floor(3, false), 3u);
  EXPECT_EQ(mast_floor(4, false), 3u);
  EXPECT_EQ(mast_floor(5, false), 3u);
  EXPECT_EQ(mast_floor(3, true), 2u);
  EXPECT_EQ(mast_floor(4, true), 2u);
  EXPECT_THROW(mast_floor(7, false), GuardError);
}

TEST(MastFloor, OracleAgreesOnFour) {
  std::size_t low = 99;
  auto ts = enumerate_unrooted(4);
  for (const auto& a : ts)
    for (const auto& b : ts) low = std::min(low, oracle::mast(a, b));
  EXPECT_EQ(low, mast_floor(4, false));
}
