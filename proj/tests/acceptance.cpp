// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agreetree/agreetree.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace agreetree;

namespace {

/// Collects failures inside one criterion; the first few are printed.
struct Check {
  int failures = 0;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures <= 5) std::cerr << "    failed: " << what << "\n";
  }
};

std::set<Label> as_set(const LeafSet& x) { return {x.begin(), x.end()}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int failed_criteria = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double took = seconds_since(start);
  if (limit_s > 0) c.expect(took < limit_s, "time " + std::to_string(took) + " s over limit");
  const bool ok = c.failures == 0;
  failed_criteria += ok ? 0 : 1;
  char head[64];
  std::snprintf(head, sizeof head, "%s %2d ", ok ? "PASS" : "FAIL", id);
  std::cout << head << name << " [" << bench::fixed(took, 2) << " s]";
  if (!c.notes.str().empty()) std::cout << " " << c.notes.str();
  std::cout << std::endl;
}

struct Outcome {
  std::string out;
  int code;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(AGREETREE_CLI) + " " + args + " 2>&1";
  Outcome r{{}, -1};
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t ceil_bound(double b) { return static_cast<std::size_t>(std::ceil(std::max(1.0, b) - 1e-9)); }

}  // namespace

int main() {
  const double delta1 = bounds::optimal_delta_match1().delta;
  const double delta2 = bounds::optimal_delta_match2().delta;

  criterion(1, "exact MAST equals brute force", 180, [](Check& c) {
    Rng rng(1001);
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 500; ++i) {
      const int n = 1 + static_cast<int>(rng.below(8));
      RootedTree a = random_rooted(n, i % 2 ? Model::Yule : Model::UniformTopology, rng);
      RootedTree b = random_rooted(n, Model::UniformTopology, rng);
      const std::size_t got = mast_rooted(a, b).size;
      c.expect(got == mast_bruteforce(a, b) && got == oracle::mast(a, b), "rooted pair " + std::to_string(i));
    }
    const double rooted_s = seconds_since(t0);
    c.expect(rooted_s < 60, "rooted part over 60 s");
    const auto t1 = std::chrono::steady_clock::now();
    for (int i = 0; i < 200; ++i) {
      const int n = 3 + static_cast<int>(rng.below(5));
      UnrootedTree a = random_unrooted(n, Model::UniformTopology, rng);
      UnrootedTree b = random_unrooted(n, i % 2 ? Model::Yule : Model::UniformTopology, rng);
      const std::size_t got = mast_unrooted(a, b).size;
      c.expect(got == mast_bruteforce(a, b) && got == oracle::mast(a, b), "unrooted pair " + std::to_string(i));
    }
    c.expect(seconds_since(t1) < 120, "unrooted part over 120 s");
    c.notes << "500 rooted, 200 unrooted pairs";
  });

  criterion(2, "f(h,k) closed form, extremal trees, exhaustive shapes", 300, [](Check& c) {
    for (int h = 0; h <= 24; ++h)
      for (int k = 0; k <= h; ++k)
        c.expect(bounds::f_closed(h, k) == bounds::f_recurrence(h, k) && bounds::f_closed(h, k) == oracle::f(h, k),
                 "f(" + std::to_string(h) + "," + std::to_string(k) + ")");
    for (int h = 0; h <= 12; ++h)
      for (int k = 0; k <= h; ++k) {
        RootedTree t = gen_extremal_fhk(h, k);
        c.expect(t.leaf_count() == bounds::f_closed(h, k), "T(h,k) leaf count");
        c.expect(max_balanced_height(t) == k, "T(h,k) balanced height");
        if (h <= 4) c.expect(oracle::max_balanced_height(t) == k, "T(h,k) balanced height, oracle");
      }
    std::size_t shapes = 0;
    for (int h = 0; h <= 4; ++h) {
      auto all = oracle::shapes_up_to_height(h);
      shapes += all.size();
      for (const RootedTree& t : all) {
        const int kb = oracle::max_balanced_height(t);
        c.expect(kb == max_balanced_height(t), "balanced height vs oracle");
        for (int k = 0; k <= h; ++k)
          if (t.leaf_count() > bounds::f_closed(h, k)) c.expect(kb > k, "shape above f(h,k) without height > k");
      }
    }
    c.notes << shapes << " shapes checked";
  });

  criterion(3, "f(h,k) <= (2h)^k", 10, [](Check& c) {
    for (int h = 1; h <= 20; ++h)
      for (int k = 1; k <= h; ++k) c.expect(bounds::fhk_upper(h, k), "h=" + std::to_string(h) + " k=" + std::to_string(k));
  });

  criterion(4, "optimal Match1 constant", 10, [](Check& c) {
    const bounds::Optimum o = bounds::optimal_delta_match1();
    c.expect(std::abs(o.value - 0.2055) <= 0.001, "alpha*");
    c.expect(std::abs(o.delta - 0.1705) <= 0.003, "delta*");
    c.notes << "alpha*=" << bench::fixed(o.value) << " at delta=" << bench::fixed(o.delta);
  });

  criterion(5, "Match1 guarantee, caterpillar output, trace inequality", 120, [](Check& c) {
    Rng rng(1005);
    int runs = 0;
    for (int m = 2; m <= 10; ++m)
      for (int i = 0; i < 200; ++i) {
        const std::size_t n = std::size_t{1} << m;
        RootedTree t1 = gen_balanced(m);
        const std::size_t t = 2 + rng.below(n - 1);
        RootedTree t2 = inst::random_on(inst::subset(t1.leaves(), t, rng), i % 2 ? Model::Yule : Model::UniformTopology, rng);
        for (double delta : {0.1705, 0.05, 0.30}) {
          Match1Result r = match1(t1, t2, delta);
          ++runs;
          const std::string tag = "m=" + std::to_string(m) + " i=" + std::to_string(i) + " delta=" + bench::fixed(delta, 4);
          c.expect(static_cast<double>(r.leaves.size()) >= std::max(1.0, bounds::match1_bound(m, t, delta)) - 1e-9, tag + " bound");
          c.expect(agrees(t1, t2, r.leaves), tag + " agreement");
          c.expect(is_caterpillar(restrict(t1, r.leaves)), tag + " caterpillar");
          c.expect(check_match1_trace(r, delta), tag + " trace");
        }
      }
    c.notes << runs << " runs";
  });

  criterion(6, "Match2 guarantee, drop bounds, balanced core", 180, [delta2](Check& c) {
    Rng rng(1006);
    int runs = 0, partial = 0;
    const std::vector<double> deltas{delta2, 0.01, 0.05};
    auto check = [&](const RootedTree& a, const RootedTree& b, double delta, bool full, int m, const std::string& tag) {
      Match2Result r = match2(a, b, delta);
      ++runs;
      const std::size_t t = set_intersection(a.leaves(), b.leaves()).size();
      c.expect(static_cast<double>(r.leaves.size()) >= std::max(1.0, bounds::match2_bound(r.m1, r.m2, t, delta)) - 1e-9,
               tag + " bound");
      c.expect(agrees(a, b, r.leaves), tag + " agreement");
      c.expect(check_match2_trace(r, delta), tag + " trace");
      if (full) {
        auto [core, h] = balanced_core(r);
        c.expect(agrees(a, b, core) && classify_balanced(restrict(a, core)) == BalanceClass::rooted(h), tag + " core");
        c.expect(h >= static_cast<int>(std::floor(bounds::beta(delta) * m)), tag + " core height");
      }
    };
    for (int m = 2; m <= 8; ++m) {
      const std::size_t n = std::size_t{1} << m;
      const auto labels = inst::iota_labels(n);
      for (int i = 0; i < 200; ++i) {
        RootedTree a = inst::balanced(m, labels, rng), b = inst::balanced(m, labels, rng);
        for (double delta : deltas) check(a, b, delta, true, m, "m=" + std::to_string(m) + " i=" + std::to_string(i));
      }
      for (int i = 0; i < 50; ++i) {
        const std::size_t t = 1 + rng.below(n - 1);
        LeafSet shared = inst::subset(LeafSet(labels), t, rng);
        std::vector<Label> second = shared.labels();
        for (std::size_t j = 0; second.size() < n; ++j) second.push_back(static_cast<Label>(10000 + j));
        RootedTree a = inst::balanced(m, labels, rng), b = inst::balanced(m, second, rng);
        for (double delta : deltas) check(a, b, delta, false, m, "partial m=" + std::to_string(m));
        ++partial;
      }
    }
    c.notes << runs << " runs, " << partial << " partial-overlap pairs";
  });

  criterion(7, "unrooted Match1 and Match2 wrappers", 300, [delta1, delta2](Check& c) {
    Rng rng(1007);
    std::size_t min_margin = SIZE_MAX;
    for (bool class_b : {true, false})
      for (int i = 0; i < 100; ++i) {
        const int m = 2 + static_cast<int>(rng.below(6));
        UnrootedTree t1 = class_b ? inst::class_b(m, rng) : inst::class_c(m, rng);
        UnrootedTree t2 = inst::random_unrooted_on(t1.leaves(), Model::UniformTopology, rng);
        const std::string tag = std::string(class_b ? "B" : "C") + " m=" + std::to_string(m);
        AgreementResult a = match1_unrooted(t1, t2, delta1);
        const double n = static_cast<double>(t1.leaf_count());
        c.expect(a.leaves.size() >= ceil_bound(bounds::alpha(delta1) * std::log2(2 * n / 3)), tag + " match1 bound");
        c.expect(oracle::unrooted_agree(t1, t2, as_set(a.leaves)) && agrees(t1, t2, a.leaves), tag + " match1 agreement");
        UnrootedTree t3 = class_b ? inst::class_b(m, rng) : inst::class_c(m, rng);
        UnrootedMatch2Result b = match2_unrooted(t1, t3, delta2);
        c.expect(b.leaves.size() >= ceil_bound(bounds::match2_unrooted_bound(m, delta2)), tag + " match2 bound");
        c.expect(agrees(t1, t3, b.leaves), tag + " match2 agreement");
        if (!class_b) {
          const auto need = static_cast<std::size_t>(std::ceil(std::exp2(m + 1) / 3.0 - 1e-9));
          c.expect(b.overlap >= need, tag + " pruning overlap");
          min_margin = std::min(min_margin, b.overlap - std::min(b.overlap, need));
        }
      }
    c.notes << "200 instances per wrapper, smallest class C overlap margin " << min_margin;
  });

  criterion(8, "caterpillar agreement and monotone runs", 600, [](Check& c) {
    Rng rng(1008);
    for (int n : {8, 64, 512, 4096}) {
      const UnrootedTree cat = gen_caterpillar(n);
      for (int i = 0; i < 100; ++i) {
        UnrootedTree t2 = random_unrooted(n, i % 2 ? Model::Yule : Model::UniformTopology, rng);
        CaterpillarResult r = caterpillar_agree(cat, t2);
        const std::string tag = "n=" + std::to_string(n);
        c.expect(r.leaves.size() >= ceil_bound(bounds::caterpillar_bound(n)), tag + " bound");
        c.expect(r.lis_length >= static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9)),
                 tag + " monotone run");
        c.expect(agrees(cat, t2, r.leaves), tag + " agreement");
      }
    }
    for (int i = 0; i < 500; ++i) {
      const std::size_t n = 1 + rng.below(200);
      std::vector<std::int64_t> s(n);
      for (std::size_t j = 0; j < n; ++j) s[j] = static_cast<std::int64_t>(j * 7 + 3);
      rng.shuffle(s);
      const MonotoneRun r = lis(s);
      c.expect(r.values.size() == oracle::longest_monotone(s), "lis vs oracle");
      c.expect(r.values.size() * r.values.size() >= n, "lis below sqrt n");
    }
  });

  criterion(9, "general agreement bound", 300, [](Check& c) {
    Rng rng(1009);
    for (int n : {8, 64, 512, 4096})
      for (int i = 0; i < 100; ++i) {
        UnrootedTree a = random_unrooted(n, Model::UniformTopology, rng);
        UnrootedTree b = random_unrooted(n, i % 2 ? Model::Yule : Model::UniformTopology, rng);
        GeneralResult r = agree_general(a, b);
        c.expect(r.leaves.size() >= ceil_bound(bounds::general_bound(n)), "n=" + std::to_string(n) + " bound");
        c.expect(agrees(a, b, r.leaves), "n=" + std::to_string(n) + " agreement");
      }
    for (int m = 2; m <= 12; ++m) {
      const int n = 1 << m;
      UnrootedTree a = gen_caterpillar(n), b = inst::class_b(m, rng);
      GeneralResult r = agree_general(a, b);
      c.expect(r.leaves.size() >= ceil_bound(bounds::general_bound(n)), "adversarial m=" + std::to_string(m));
      c.expect(agrees(a, b, r.leaves), "adversarial agreement");
    }
  });

  criterion(10, "balanced-or-path split", 300, [](Check& c) {
    Rng rng(1010);
    int balanced = 0, path = 0;
    for (int i = 0; i < 400; ++i) {
      const int n = 4 + static_cast<int>(std::exp2(rng.uniform01() * 12.0)) % 4093;
      RamseyOutcome r = i % 2 ? ramsey_split(random_unrooted(n, Model::UniformTopology, rng))
                              : ramsey_split(random_rooted(n, Model::Yule, rng));
      c.expect(r.met(), "random n=" + std::to_string(n));
      (r.kind == RamseyKind::BalancedFound ? balanced : path) += 1;
    }
    for (int h = 2; h <= 16; ++h)
      for (int k = 0; k <= h; ++k) {
        RootedTree t = gen_extremal_fhk(h, k);
        if (t.leaf_count() <= 2) continue;
        RamseyOutcome r = ramsey_split(t);
        c.expect(r.met(), "T(" + std::to_string(h) + "," + std::to_string(k) + ")");
        (r.kind == RamseyKind::BalancedFound ? balanced : path) += 1;
        if (t.leaf_count() >= 3 && h <= 12) c.expect(ramsey_split(unroot(t)).met(), "unrooted T(h,k)");
      }
    c.notes << balanced << " balanced, " << path << " path outcomes";
  });

  criterion(11, "swap pairs", 120, [](Check& c) {
    RootedPair p1 = gen_swap_pair(1);
    UnrootedPair u1 = gen_swap_pair_unrooted(1);
    const std::size_t r1 = mast_rooted(p1.first, p1.second).size, q1 = mast_unrooted(u1.first, u1.second).size;
    c.expect(r1 == 2, "k=1 rooted");
    c.expect(q1 == 3, "k=1 unrooted");
    RootedPair p2 = gen_swap_pair(2);
    const std::size_t r2 = mast_rooted(p2.first, p2.second).size;
    c.expect(r2 <= 4, "k=2 rooted above 2^k");
    const auto t3 = std::chrono::steady_clock::now();
    RootedPair p3 = gen_swap_pair(3);
    const std::size_t r3 = mast_rooted(p3.first, p3.second).size;
    c.expect(r3 <= 8, "k=3 rooted above 2^k");
    c.expect(seconds_since(t3) < 60, "k=3 over 60 s");
    c.notes << "rooted MAST k=1,2,3: " << r1 << "," << r2 << "," << r3 << "; unrooted k=1: " << q1
            << "; observed >= 2^k: " << (r1 >= 2 && r2 >= 4 && r3 >= 8 ? "yes" : "no");
  });

  criterion(12, "mast(n) floor values", 120, [](Check& c) {
    // Goldens for n = 4, 5 come from full enumeration, frozen after the first run.
    const std::size_t m3 = mast_floor(3, false), m4 = mast_floor(4, false), m5 = mast_floor(5, false);
    c.expect(m3 == 3, "mast(3)");
    c.expect(m4 == 3, "mast(4) golden");
    c.expect(m5 == 3, "mast(5) golden");
    c.expect(mast_floor(4, false) == m4 && mast_floor(5, false) == m5, "recomputation");
    for (int n : {4, 5}) {
      std::size_t low = SIZE_MAX;
      auto ts = enumerate_unrooted(n);
      for (const auto& a : ts)
        for (const auto& b : ts) low = std::min(low, oracle::mast(a, b));
      c.expect(low == (n == 4 ? m4 : m5), "oracle enumeration n=" + std::to_string(n));
    }
    c.notes << "mast(3..5) = " << m3 << "," << m4 << "," << m5;
  });

  criterion(13, "CLI determinism", 300, [](Check& c) {
    const std::string cli = AGREETREE_CLI;
    const std::vector<std::string> commands{
        "gen random --n 64 --seed 5",
        "gen random --n 64 --seed 5 --model yule --rooted",
        "gen fhk --h 6 --k 3",
        "gen swap-pair --k 2",
        "gen enumerate --n 5",
        "mast \"$(" + cli + " gen random --n 30 --seed 1)\" \"$(" + cli + " gen random --n 30 --seed 2)\" --format json",
        "match1 \"$(" + cli + " gen balanced --m 6)\" \"$(" + cli + " gen random --n 64 --seed 3 --rooted)\" --trace",
        "match2 \"$(" + cli + " gen balanced --m 4)\" \"$(" + cli + " gen swap-pair --k 2 | tail -n 1)\" --trace",
        "agree \"$(" + cli + " gen random --n 200 --seed 7)\" \"$(" + cli + " gen random --n 200 --seed 8)\"",
        "decompose \"$(" + cli + " gen random --n 300 --seed 9)\" --format json",
        "bounds --n 4096",
        "bench --n 8,16,32 --trials 5 --algorithms mast-exact,match1,match2,agree,caterpillar --model uniform,yule --seed 3",
        "bench --floor --n 3..5",
    };
    for (const std::string& cmd : commands) {
      Outcome a = run_cli(cmd), b = run_cli(cmd);
      c.expect(a.code == 0, "exit code " + std::to_string(a.code) + ": " + cmd);
      c.expect(!a.out.empty() && a.out == b.out, "output differs: " + cmd);
    }
    c.notes << commands.size() << " commands run twice";
  });

  std::cout << (failed_criteria ? "FAIL" : "PASS") << " overall: " << 13 - failed_criteria << "/13 criteria" << std::endl;
  return failed_criteria ? 1 : 0;
}
