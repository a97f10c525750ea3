#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <string>

namespace {

struct Outcome {
  std::string out;
  int code;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(AGREETREE_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  Outcome r{{}, -1};
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST(Cli, GenBalanced) {
  Outcome r = run("gen balanced --m 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "((1,2),(3,4));\n");
}

TEST(Cli, GenExtremalAndSwap) {
  Outcome f = run("gen fhk --h 4 --k 2");
  EXPECT_EQ(f.code, 0);
  EXPECT_EQ(std::count(f.out.begin(), f.out.end(), ','), 10);  // 11 leaves
  Outcome s = run("gen swap-pair --k 1");
  EXPECT_EQ(s.out, "((1,2),(3,4));\n((1,3),(2,4));\n");
}

TEST(Cli, Deterministic) {
  for (const char* args : {"gen random --n 50 --seed 9", "bench --n 8,16 --trials 3 --algorithms agree,match1 --seed 4",
                           "agree \"$(" AGREETREE_CLI " gen random --n 40 --seed 1)\" \"$(" AGREETREE_CLI
                           " gen random --n 40 --seed 2)\" --format json"}) {
    Outcome a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_FALSE(a.out.empty()) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("mast '((1,2),(3,4));' '((1,3),(2,4));'").code, 0);
  EXPECT_EQ(run("verify '((1,2),(3,4));' '((1,3),(2,4));' --leaves 1,2,3").code, 2);
  EXPECT_EQ(run("verify '((1,2),(3,4));' '((1,3),(2,4));' --leaves 1,2").code, 0);
  EXPECT_EQ(run("mast '((1,2),3' '(1,2,3);'").code, 1);
  EXPECT_EQ(run("gen nonsense").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("match1 '((1,2),3);' '((1,2),3);'").code, 1);  // not balanced
}

TEST(Cli, JsonOutput) {
  Outcome r = run("mast '((1,2),(3,4));' '((1,3),(2,4));' --format json");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"size\":2"), std::string::npos);
}

TEST(Cli, BenchRowsAndFloor) {
  Outcome b = run("bench --n 16 --trials 10 --algorithms match1 --seed 1");
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 11);  // header + 10 rows
  EXPECT_EQ(b.out.find(",false"), std::string::npos);
  Outcome f = run("bench --floor --n 3..6");
  EXPECT_EQ(f.code, 0);
  EXPECT_NE(f.out.find("3,2,3"), std::string::npos);
  EXPECT_NE(f.out.find("4,2,3"), std::string::npos);
}

TEST(Cli, MatchersOnConstructions) {
  const std::string cli = AGREETREE_CLI;
  Outcome m2 = run("match2 \"$(" + cli + " gen swap-pair --k 2 | head -n 1)\" \"$(" + cli +
                   " gen swap-pair --k 2 | tail -n 1)\" --format json");
  EXPECT_EQ(m2.code, 0);
  EXPECT_NE(m2.out.find("\"met\":true"), std::string::npos);
  Outcome ag = run("agree \"$(" + cli + " gen caterpillar --n 64)\" \"$(" + cli + " gen balanced --m 6)\"");
  EXPECT_EQ(ag.code, 0);
  Outcome same = run("mast \"$(" + cli + " gen random --n 20 --seed 4)\" \"$(" + cli + " gen random --n 20 --seed 4)\"");
  EXPECT_NE(same.out.find("size: 20"), std::string::npos);
}
