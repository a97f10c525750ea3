// Compares a balanced tree with a random one three ways: exact MAST, Match1
// and the general pipeline.
#include <iostream>

#include "agreetree/agreetree.hpp"

int main() {
  using namespace agreetree;

  const RootedTree balanced = gen_balanced(4);
  Rng rng(7);
  const RootedTree other = random_rooted(16, Model::UniformTopology, rng);
  std::cout << "T1 = " << to_newick(balanced) << "\n";
  std::cout << "T2 = " << to_newick(other) << "\n";

  const MastResult exact = mast_rooted(balanced, other);
  std::cout << "rooted MAST:   " << exact.size << " {" << to_string(exact.witness) << "}\n";

  const double delta = bounds::optimal_delta_match1().delta;
  const Match1Result m1 = match1(balanced, other, delta);
  std::cout << "Match1:        " << m1.leaves.size() << " {" << to_string(m1.leaves) << "}, guarantee "
            << m1.report.clamped_bound() << "\n";

  const GeneralResult g = agree_general(unroot(balanced), unroot(other));
  std::cout << "unrooted agree: " << g.leaves.size() << " via " << g.source << ", shape " << g.certificate.restricted_shape
            << "\n";
}
