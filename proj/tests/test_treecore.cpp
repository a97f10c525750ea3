#include <gtest/gtest.h>

#include "agreetree/agreetree.hpp"

using namespace agreetree;

TEST(LeafSet, SortsAndDeduplicates) {
  LeafSet s{4, 1, 3, 1};
  EXPECT_EQ(s.labels(), (std::vector<Label>{1, 3, 4}));
  EXPECT_EQ(s.min(), 1);
  EXPECT_EQ(s.max(), 4);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(to_string(s), "1,3,4");
}

TEST(LeafSet, SetAlgebra) {
  LeafSet a{1, 2, 3}, b{2, 3, 5};
  EXPECT_EQ(set_intersection(a, b), (LeafSet{2, 3}));
  EXPECT_EQ(set_union(a, b), (LeafSet{1, 2, 3, 5}));
  EXPECT_EQ(set_difference(a, b), (LeafSet{1}));
  EXPECT_TRUE((LeafSet{2, 3}).is_subset_of(a));
  EXPECT_FALSE(b.is_subset_of(a));
}

TEST(RootedTree, BuilderAndQueries) {
  RootedTree::Builder b;
  NodeId x = b.add_leaf(1), y = b.add_leaf(2), z = b.add_leaf(3);
  NodeId xy = b.add_internal(x, y);
  NodeId root = b.add_internal(xy, z);
  RootedTree t = std::move(b).build(root);
  EXPECT_EQ(t.leaf_count(), 3u);
  EXPECT_EQ(t.node_count(), 5u);
  EXPECT_EQ(t.leaf_order(), (std::vector<Label>{1, 2, 3}));
  EXPECT_EQ(t.depth(t.leaf_node(1)), 2);
  EXPECT_EQ(t.depth(t.leaf_node(3)), 1);
  EXPECT_TRUE(t.is_ancestor(root, x));
  EXPECT_FALSE(t.is_ancestor(x, root));
  EXPECT_EQ(t.parent(x), xy);
  EXPECT_EQ(t.leaf_count_below(xy), 2u);
  EXPECT_EQ(t.min_label(root), 1);
  EXPECT_THROW(t.leaf_node(9), PreconditionError);
}

TEST(RootedTree, RejectsMalformedInput) {
  {
    RootedTree::Builder b;
    NodeId x = b.add_leaf(1);
    NodeId y = b.add_leaf(1);
    EXPECT_THROW(std::move(b).build(b.add_internal(x, y)), PreconditionError);
  }
  {
    RootedTree::Builder b;
    NodeId x = b.add_leaf(0);
    EXPECT_THROW(std::move(b).build(x), PreconditionError);
  }
  {
    RootedTree::Builder b;
    NodeId x = b.add_leaf(1);
    b.add_leaf(2);
    EXPECT_THROW(std::move(b).build(x), PreconditionError);  // unreachable node
  }
}

TEST(UnrootedTree, ValidatesDegrees) {
  UnrootedTree::Builder b;
  VertexId c = b.add_internal();
  VertexId l1 = b.add_leaf(1), l2 = b.add_leaf(2);
  b.connect(c, l1);
  b.connect(c, l2);
  EXPECT_THROW(std::move(b).build(), PreconditionError);
}

TEST(UnrootedTree, EdgesAndPendants) {
  UnrootedTree t = parse_unrooted("((1,2),3,(4,5));");
  EXPECT_EQ(t.leaf_count(), 5u);
  EXPECT_EQ(t.edges().size(), 7u);  // 2n - 3
  Edge e = t.pendant_edge(4);
  EXPECT_TRUE(t.has_edge(e));
  EXPECT_EQ(t.degree(t.leaf_vertex(4)), 1u);
}

TEST(Newick, RoundTripsCanonically) {
  EXPECT_EQ(to_newick(parse_rooted("(3,(2,1));")), "((1,2),3);");
  EXPECT_EQ(to_newick(parse_rooted(" ( ( 4 , 3 ) , ( 2 , 1 ) ) ; ")), "((1,2),(3,4));");
  EXPECT_EQ(to_newick(parse_rooted("7;")), "7;");
  EXPECT_EQ(to_newick(parse_unrooted("((4,5),3,(1,2));")), "(1,2,(3,(4,5)));");
  for (const char* s : {"((1,2),(3,4));", "(1,(2,(3,4)));", "(1,2,3);", "((1,2),3,(4,5));"}) {
    Tree t = parse_newick(s);
    EXPECT_EQ(to_newick(parse_newick(to_newick(t))), to_newick(t));
  }
}

TEST(Newick, ReportsErrorPositions) {
  auto position = [](const char* s) {
    try {
      parse_newick(s);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1L;
  };
  EXPECT_EQ(position("((1,2),3)"), 9);      // missing ';'
  EXPECT_EQ(position("((1,2),1);"), 7);     // duplicate label
  EXPECT_EQ(position("((1,02),3);"), 4);    // leading zero
  EXPECT_GE(position("((1,2,3),4);"), 0);   // inner trifurcation
  EXPECT_GE(position("(1,2);x"), 0);        // trailing text
  EXPECT_GE(position("(1,2,3,4);"), 0);     // four children
}

TEST(Newick, ParsesSeveralTrees) {
  auto ts = parse_newick_all("((1,2),3);\n(1,2,3);\n");
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<RootedTree>(ts[0]));
  EXPECT_TRUE(std::holds_alternative<UnrootedTree>(ts[1]));
}

TEST(Structure, HeightCenterRadius) {
  EXPECT_EQ(height(gen_balanced(3)), 3);
  UnrootedTree b = unroot(gen_balanced(3));
  EXPECT_EQ(center(b).size(), 2u);
  EXPECT_EQ(radius(b), 3);
  UnrootedTree c = parse_unrooted("((1,2),(3,4),(5,6));");
  EXPECT_EQ(center(c).size(), 1u);
  EXPECT_EQ(radius(c), 2);
}

TEST(Structure, ClassifiesBalancedTrees) {
  EXPECT_EQ(classify_balanced(gen_balanced(3)), BalanceClass::rooted(3));
  EXPECT_EQ(classify_balanced(gen_caterpillar_rooted(4)), BalanceClass::none());
  EXPECT_EQ(classify_balanced(unroot(gen_balanced(3))), BalanceClass::class_b(3));
  EXPECT_EQ(classify_balanced(parse_unrooted("((1,2),(3,4),(5,6));")), BalanceClass::class_c(2));
  EXPECT_EQ(classify_balanced(parse_unrooted("(1,2,3);")), BalanceClass::class_c(1));
  EXPECT_EQ(classify_balanced(gen_caterpillar(6)), BalanceClass::none());
}

TEST(Structure, Caterpillars) {
  EXPECT_TRUE(is_caterpillar(gen_caterpillar(8)));
  EXPECT_FALSE(is_caterpillar(unroot(gen_balanced(3))));
  EXPECT_TRUE(is_caterpillar(unroot(gen_balanced(2))));
  EXPECT_TRUE(is_caterpillar(gen_caterpillar_rooted(6)));
  EXPECT_TRUE(is_caterpillar(gen_balanced(2)));
  EXPECT_FALSE(is_caterpillar(gen_balanced(3)));
}

TEST(Structure, RootingAndUnrooting) {
  UnrootedTree u = parse_unrooted("((1,2),3,(4,5));");
  RootedTree r = root_at_edge(u, u.pendant_edge(3));
  EXPECT_EQ(to_newick(r), "(((1,2),(4,5)),3);");
  EXPECT_EQ(to_newick(unroot(r)), to_newick(u));
  for (const Edge& e : u.edges()) EXPECT_EQ(to_newick(unroot(root_at_edge(u, e))), to_newick(u));
  EXPECT_THROW(unroot(parse_rooted("(1,2);")), PreconditionError);
}

TEST(Structure, Relabel) {
  RootedTree t = relabel(gen_balanced(2), [](Label x) { return 10 * x; });
  EXPECT_EQ(to_newick(t), "((10,20),(30,40));");
}
