// agreetree: command-line front end for the agreetree library.
//
// Exit codes: 0 success, 1 usage or input error, 2 a guarantee was not met.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "agreetree/agreetree.hpp"

namespace {

using agreetree::GuaranteeReport;
using agreetree::LeafSet;
using agreetree::RootedTree;
using agreetree::Tree;
using agreetree::UnrootedTree;
using json = nlohmann::ordered_json;
namespace at = agreetree;

constexpr int kExitBound = 2;

struct Options {
  double delta = 0.0;
  std::uint64_t seed = 1;
  int trials = 10;
  std::string n = "16";
  std::string model = "uniform";
  std::string out;
  bool trace = false;
  std::string format = "text";
  std::vector<std::string> inputs;
};

std::string read_source(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw at::PreconditionError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Trees from every input in order. An input that does not name a readable
/// file is parsed as Newick text itself.
std::vector<Tree> load_trees(const std::vector<std::string>& inputs) {
  std::vector<Tree> out;
  for (const std::string& s : inputs) {
    const bool inline_text = s != "-" && s.find_first_of("(;") != std::string::npos && !std::ifstream(s);
    auto trees = at::parse_newick_all(inline_text ? s : read_source(s));
    for (auto& t : trees) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Tree> need_trees(const Options& o, std::size_t count) {
  std::vector<Tree> t = load_trees(o.inputs);
  if (t.size() < count)
    throw at::PreconditionError("expected " + std::to_string(count) + " trees, got " + std::to_string(t.size()));
  return t;
}

bool all_rooted(const std::vector<Tree>& ts, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (!std::holds_alternative<RootedTree>(ts[i])) return false;
  return true;
}

UnrootedTree as_unrooted(const Tree& t) {
  if (auto* u = std::get_if<UnrootedTree>(&t)) return *u;
  return at::unroot(std::get<RootedTree>(t));
}

json leaves_json(const LeafSet& x) { return json(x.labels()); }

json report_json(const GuaranteeReport& r) {
  return json{{"algorithm", r.algorithm},
              {"delta", at::bench::fixed(r.delta)},
              {"bound", at::bench::fixed(r.bound_value)},
              {"clamped_bound", at::bench::fixed(r.clamped_bound())},
              {"achieved", r.achieved},
              {"met", r.met()}};
}

void emit(const Options& o, const json& doc) {
  std::ostringstream text;
  if (o.format == "json") {
    text << doc.dump() << "\n";
  } else if (o.format == "csv") {
    std::string header, row;
    for (const auto& [k, v] : doc.items()) {
      if (v.is_object() || v.is_array()) continue;
      header += (header.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") + at::bench::csv_field(v.is_string() ? v.get<std::string>() : v.dump());
    }
    text << header << "\n" << row << "\n";
  } else {
    for (const auto& [k, v] : doc.items()) {
      if (v.is_object()) {
        for (const auto& [k2, v2] : v.items())
          text << k << "." << k2 << ": " << (v2.is_string() ? v2.get<std::string>() : v2.dump()) << "\n";
      } else {
        text << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  }
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw at::PreconditionError("cannot write '" + o.out + "'");
    f << text.str();
  }
}

int finish(const Options& o, json doc, const GuaranteeReport& r) {
  doc["report"] = report_json(r);
  emit(o, doc);
  if (!r.met()) {
    std::cerr << "agreetree: guarantee not met: achieved " << r.achieved << " < bound " << at::bench::fixed(r.clamped_bound())
              << " (" << r.algorithm << ")\n";
    return kExitBound;
  }
  return 0;
}

at::Model parse_model(const std::string& s) {
  if (s == "uniform") return at::Model::UniformTopology;
  if (s == "yule") return at::Model::Yule;
  throw at::PreconditionError("unknown model '" + s + "' (uniform or yule)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "16,64" or "3..6" (inclusive) or a mix.
std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  for (const std::string& item : split_list(s)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(item));
    } else {
      for (int v = std::stoi(item.substr(0, dots)); v <= std::stoi(item.substr(dots + 2)); ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw at::PreconditionError("empty size list");
  return out;
}

int first_size(const Options& o) { return parse_sizes(o.n).front(); }

// --- gen -------------------------------------------------------------------

struct GenOptions {
  std::string kind;
  int m = 3, h = 4, k = 1;
  bool rooted = false, unrooted = false;
};

int cmd_gen(const Options& o, const GenOptions& g) {
  std::vector<std::string> lines;
  if (g.kind == "balanced") {
    lines.push_back(at::to_newick(at::gen_balanced(g.m)));
  } else if (g.kind == "caterpillar") {
    const int n = first_size(o);
    lines.push_back(g.rooted ? at::to_newick(at::gen_caterpillar_rooted(n)) : at::to_newick(at::gen_caterpillar(n)));
  } else if (g.kind == "random") {
    const at::RandomModel rm{parse_model(o.model), o.seed};
    const int n = first_size(o);
    lines.push_back(g.rooted ? at::to_newick(at::gen_random_rooted(n, rm)) : at::to_newick(at::gen_random(n, rm)));
  } else if (g.kind == "fhk") {
    lines.push_back(at::to_newick(at::gen_extremal_fhk(g.h, g.k)));
  } else if (g.kind == "swap-pair") {
    if (g.unrooted) {
      auto p = at::gen_swap_pair_unrooted(g.k);
      lines = {at::to_newick(p.first), at::to_newick(p.second)};
    } else {
      auto p = at::gen_swap_pair(g.k);
      lines = {at::to_newick(p.first), at::to_newick(p.second)};
    }
  } else if (g.kind == "enumerate") {
    const int n = first_size(o);
    if (g.rooted)
      for (const auto& t : at::enumerate_rooted(n)) lines.push_back(at::to_newick(t));
    else
      for (const auto& t : at::enumerate_unrooted(n)) lines.push_back(at::to_newick(t));
  } else {
    throw at::PreconditionError("unknown kind '" + g.kind + "'");
  }
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw at::PreconditionError("cannot write '" + o.out + "'");
    f << text;
  }
  return 0;
}

// --- compute ---------------------------------------------------------------

int cmd_mast(const Options& o) {
  auto ts = need_trees(o, 2);
  at::MastResult r = all_rooted(ts, 2) ? at::mast_rooted(std::get<RootedTree>(ts[0]), std::get<RootedTree>(ts[1]))
                                       : at::mast_unrooted(as_unrooted(ts[0]), as_unrooted(ts[1]));
  json doc{{"algorithm", "mast-exact"},
           {"size", r.size},
           {"leaves", leaves_json(r.witness)},
           {"certificate", r.certificate.restricted_shape}};
  return finish(o, doc, GuaranteeReport{"mast-exact", 0.0, 1.0, r.size});
}

double delta_or(const Options& o, double fallback) { return o.delta > 0 ? o.delta : fallback; }

void print_trace_match1(const at::Match1Result& r) {
  for (const auto& s : r.trace)
    std::cerr << json{{"u", s.u}, {"v", s.v}, {"t", s.t}, {"rule", at::to_string(s.rule)}, {"emitted", s.emitted}}.dump()
              << "\n";
}

void print_trace_match2(const at::Match2Result& r) {
  for (std::size_t i = 0; i < r.calls.size(); ++i) {
    const auto& c = r.calls[i];
    std::cerr << json{{"id", i},         {"parent", c.parent}, {"u", c.u},
                      {"v", c.v},        {"t", c.t},           {"rule", at::to_string(c.rule)},
                      {"emitted", c.emitted}}
                     .dump()
              << "\n";
  }
}

int cmd_match1(const Options& o) {
  auto ts = need_trees(o, 2);
  const double delta = delta_or(o, at::bounds::optimal_delta_match1().delta);
  if (all_rooted(ts, 2)) {
    at::Match1Result r = at::match1(std::get<RootedTree>(ts[0]), std::get<RootedTree>(ts[1]), delta);
    if (o.trace) print_trace_match1(r);
    json doc{{"algorithm", "match1"},
             {"size", r.leaves.size()},
             {"leaves", leaves_json(r.leaves)},
             {"certificate", r.certificate.restricted_shape},
             {"caterpillar", at::is_caterpillar(at::restrict(std::get<RootedTree>(ts[0]), r.leaves))},
             {"trace_ok", at::check_match1_trace(r, delta)}};
    return finish(o, doc, r.report);
  }
  at::AgreementResult r = at::match1_unrooted(as_unrooted(ts[0]), as_unrooted(ts[1]), delta);
  json doc{{"algorithm", "match1-unrooted"},
           {"size", r.leaves.size()},
           {"leaves", leaves_json(r.leaves)},
           {"certificate", r.certificate.restricted_shape}};
  return finish(o, doc, r.report);
}

int cmd_match2(const Options& o) {
  auto ts = need_trees(o, 2);
  const double delta = delta_or(o, at::bounds::optimal_delta_match2().delta);
  if (all_rooted(ts, 2)) {
    at::Match2Result r = at::match2(std::get<RootedTree>(ts[0]), std::get<RootedTree>(ts[1]), delta);
    if (o.trace) print_trace_match2(r);
    auto [core, h] = at::balanced_core(r);
    json doc{{"algorithm", "match2"},
             {"size", r.leaves.size()},
             {"leaves", leaves_json(r.leaves)},
             {"certificate", r.certificate.restricted_shape},
             {"balanced_core_height", h},
             {"trace_ok", at::check_match2_trace(r, delta)}};
    return finish(o, doc, r.report);
  }
  at::UnrootedMatch2Result r = at::match2_unrooted(as_unrooted(ts[0]), as_unrooted(ts[1]), delta);
  json doc{{"algorithm", "match2-unrooted"},
           {"size", r.leaves.size()},
           {"leaves", leaves_json(r.leaves)},
           {"certificate", r.certificate.restricted_shape},
           {"overlap", r.overlap},
           {"overlap_required", r.overlap_required}};
  return finish(o, doc, r.report);
}

int cmd_match_multi(const Options& o) {
  auto ts = need_trees(o, 2);
  if (!all_rooted(ts, ts.size())) throw at::PreconditionError("match-multi needs rooted trees");
  std::vector<RootedTree> trees;
  for (auto& t : ts) trees.push_back(std::get<RootedTree>(t));
  const double delta = delta_or(o, at::bounds::optimal_delta_match2().delta);
  at::MultiMatchResult r = at::match2_multi(trees, delta);
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back(report_json(s));
  json doc{{"algorithm", "match-multi"},
           {"size", r.leaves.size()},
           {"leaves", leaves_json(r.leaves)},
           {"composed_bound", at::bench::fixed(r.composed_bound)},
           {"core_heights", r.core_heights},
           {"stages", stages}};
  if (!r.diagnostic.empty()) doc["diagnostic"] = r.diagnostic;
  // Each stage carries its own lemma guarantee; the run passes when all do.
  GuaranteeReport overall{"match-multi", delta, 1.0, r.leaves.size()};
  for (const auto& s : r.stages)
    if (!s.met()) overall = s;
  return finish(o, doc, overall);
}

struct AbOptions {
  double k = 1.0;
  std::string mode = "one";
};

int cmd_match_ab(const Options& o, const AbOptions& ab) {
  auto ts = need_trees(o, 2);
  const bool one = ab.mode == "one";
  if (!one && ab.mode != "both") throw at::PreconditionError("mode must be 'one' or 'both'");
  const double delta = delta_or(o, one ? at::bounds::alpha_k_delta(ab.k) : at::bounds::beta_k_delta(ab.k));
  at::AlmostBalancedResult r =
      at::match_almost_balanced(as_unrooted(ts[0]), as_unrooted(ts[1]), ab.k, delta,
                                one ? at::AlmostBalancedMode::OneTree : at::AlmostBalancedMode::BothTrees);
  json doc{{"algorithm", r.report.algorithm},
           {"size", r.leaves.size()},
           {"leaves", leaves_json(r.leaves)},
           {"certificate", r.certificate.restricted_shape},
           {"lemma_bound", at::bench::fixed(r.lemma_bound)}};
  return finish(o, doc, r.report);
}

int cmd_agree(const Options& o) {
  auto ts = need_trees(o, 2);
  at::GeneralResult r = at::agree_general(as_unrooted(ts[0]), as_unrooted(ts[1]));
  json doc{{"algorithm", "agree"},
           {"size", r.leaves.size()},
           {"leaves", leaves_json(r.leaves)},
           {"certificate", r.certificate.restricted_shape},
           {"source", r.source},
           {"split", at::to_string(r.split.kind)}};
  return finish(o, doc, r.report);
}

int cmd_decompose(const Options& o) {
  auto ts = need_trees(o, 1);
  at::RamseyOutcome r = std::holds_alternative<RootedTree>(ts[0]) ? at::ramsey_split(std::get<RootedTree>(ts[0]))
                                                                   : at::ramsey_split(std::get<UnrootedTree>(ts[0]));
  json doc{{"outcome", at::to_string(r.kind)},
           {"value", r.value},
           {"phi", at::bench::fixed(r.phi)},
           {"path_threshold", at::bench::fixed(r.path_threshold)},
           {"balanced_required", r.balanced_required()},
           {"path_required", r.path_required()},
           {"met", r.met()},
           {"leaves", leaves_json(r.leaves)}};
  emit(o, doc);
  return r.met() ? 0 : kExitBound;
}

int cmd_verify(const Options& o, const std::string& leaves) {
  auto ts = need_trees(o, 2);
  std::vector<at::Label> xs;
  for (const auto& s : split_list(leaves)) xs.push_back(std::stoll(s));
  const LeafSet x(std::move(xs));
  json doc{{"leaves", leaves_json(x)}};
  try {
    at::AgreementCertificate c = all_rooted(ts, 2)
                                     ? at::verify_agreement(std::get<RootedTree>(ts[0]), std::get<RootedTree>(ts[1]), x)
                                     : at::verify_agreement(as_unrooted(ts[0]), as_unrooted(ts[1]), x);
    doc["valid"] = true;
    doc["certificate"] = c.restricted_shape;
    emit(o, doc);
    return 0;
  } catch (const at::VerificationError& e) {
    doc["valid"] = false;
    doc["reason"] = e.what();
    emit(o, doc);
    return kExitBound;
  }
}

int cmd_bounds(const Options& o) {
  const auto m1 = at::bounds::optimal_delta_match1();
  const auto m2 = at::bounds::optimal_delta_match2();
  const double n = first_size(o);
  json doc{{"alpha_star", at::bench::fixed(m1.value)},
           {"delta_star_match1", at::bench::fixed(m1.delta)},
           {"beta_star", at::bench::fixed(m2.value)},
           {"delta_star_match2", at::bench::fixed(m2.delta)},
           {"n", static_cast<int>(n)}};
  if (n > 2) {
    doc["phi"] = at::bench::fixed(at::bounds::phi(n, 0.5));
    doc["psi"] = at::bench::fixed(at::bounds::psi(n, 0.5));
    doc["path_threshold"] = at::bench::fixed(at::bounds::path_threshold(n, 0.5));
    doc["general_bound"] = at::bench::fixed(at::bounds::general_bound(n));
    doc["caterpillar_bound"] = at::bench::fixed(at::bounds::caterpillar_bound(n));
  }
  json table = json::object();
  for (int h = 1; h <= 8; ++h) {
    json row = json::array();
    for (int k = 0; k <= h; ++k) row.push_back(at::bounds::f_closed(h, k));
    table["h=" + std::to_string(h)] = row;
  }
  doc["f"] = table;
  if (o.format == "text") {
    json flat = doc;
    flat.erase("f");
    emit(o, flat);
    if (o.out.empty())
      for (const auto& [k, v] : table.items()) std::cout << "f(" << k << "): " << v.dump() << "\n";
    return 0;
  }
  emit(o, doc);
  return 0;
}

// --- bench -----------------------------------------------------------------

struct BenchOptions {
  std::string algorithms = "match1";
  bool timing = false;
  bool floor = false;
  unsigned threads = 0;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw at::PreconditionError("cannot write '" + path + "'");
  f << text;
}

int cmd_bench(const Options& o, const BenchOptions& b) {
  if (b.floor) {
    std::string text = "n,mast_rooted,mast_unrooted\n";
    for (int n : parse_sizes(o.n))
      text += std::to_string(n) + "," + std::to_string(at::mast_floor(n, true)) + "," +
              (n >= 3 ? std::to_string(at::mast_floor(n, false)) : std::string()) + "\n";
    write_text(o.out, text);
    return 0;
  }
  at::bench::BenchConfig cfg;
  cfg.ns = parse_sizes(o.n);
  cfg.trials = o.trials;
  cfg.models.clear();
  for (const auto& m : split_list(o.model)) cfg.models.push_back(parse_model(m));
  cfg.algorithms = split_list(b.algorithms);
  cfg.seed_base = o.seed;
  cfg.delta = o.delta;
  cfg.timing = b.timing;
  cfg.threads = b.threads;
  const auto records = at::bench::run_bench(cfg);
  std::string text = at::bench::csv_header() + "\n";
  for (const auto& r : records) text += at::bench::to_csv(r) + "\n";
  write_text(o.out, text);
  const auto summary = at::bench::summarize(records);
  std::string stext = at::bench::summary_header() + "\n";
  for (const auto& s : summary) stext += at::bench::to_csv(s) + "\n";
  if (o.out.empty())
    std::cerr << stext;
  else
    write_text(o.out + ".summary.csv", stext);
  int code = 0;
  for (const auto& r : records) {
    if (!r.certificate_ok) throw at::VerificationError("trial with seed " + std::to_string(r.seed) + " failed verification");
    if (!r.bound_met()) code = kExitBound;
  }
  if (code) std::cerr << "agreetree: at least one trial fell below its guarantee\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agreement subtrees of phylogenetic trees"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--delta", o.delta, "Algorithm parameter (default: the algorithm's optimum)");
    sub->add_option("--seed", o.seed, "Seed (bench: seed base)");
    sub->add_option("--trials", o.trials, "Trials per configuration");
    sub->add_option("--n", o.n, "Leaf count, list (16,64) or range (3..6)");
    sub->add_option("--model", o.model, "Random model: uniform or yule (bench: comma list)");
    sub->add_option("--out", o.out, "Write output to this file");
    sub->add_flag("--trace", o.trace, "Write the matcher trace to stderr as JSON lines");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  };
  auto with_inputs = [&o, &common](CLI::App* sub) {
    common(sub);
    sub->add_option("trees", o.inputs, "Newick files ('-' for stdin) or inline Newick")->required();
  };

  GenOptions g;
  auto* gen = app.add_subcommand("gen", "Generate trees as Newick");
  gen->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  common(gen);
  gen->add_option("kind", g.kind, "balanced, caterpillar, random, fhk, swap-pair or enumerate")
      ->required()
      ->check(CLI::IsMember({"balanced", "caterpillar", "random", "fhk", "swap-pair", "enumerate"}));
  gen->add_option("--m", g.m, "Height of a balanced tree");
  gen->add_option("--h", g.h, "Height bound for fhk");
  gen->add_option("--k", g.k, "k for fhk and swap-pair");
  gen->add_flag("--rooted", g.rooted, "Rooted output");
  gen->add_flag("--unrooted", g.unrooted, "Unrooted swap pair");

  auto* mast = app.add_subcommand("mast", "Exact maximum agreement subtree");
  mast->alias("mast-exact");
  with_inputs(mast);
  auto* m1 = app.add_subcommand("match1", "Match1 (balanced vs any tree)");
  with_inputs(m1);
  auto* m2 = app.add_subcommand("match2", "Match2 (balanced vs balanced)");
  with_inputs(m2);
  auto* mm = app.add_subcommand("match-multi", "Iterated Match2 over several balanced trees");
  with_inputs(mm);
  AbOptions ab;
  auto* mab = app.add_subcommand("match-ab", "Almost balanced trees");
  with_inputs(mab);
  mab->add_option("--k", ab.k, "Radius factor k");
  mab->add_option("--mode", ab.mode, "one or both")->check(CLI::IsMember({"one", "both"}));
  auto* agree = app.add_subcommand("agree", "General agreement pipeline");
  with_inputs(agree);
  auto* dec = app.add_subcommand("decompose", "Balanced-or-path split of one tree");
  with_inputs(dec);
  std::string verify_leaves;
  auto* ver = app.add_subcommand("verify", "Check that a leaf set is an agreement set");
  with_inputs(ver);
  ver->add_option("--leaves", verify_leaves, "Comma separated labels")->required();
  auto* bnd = app.add_subcommand("bounds", "Constants, f(h,k) table and thresholds for n");
  common(bnd);
  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Randomized trials as CSV");
  common(bench);
  bench->add_option("--algorithms", bo.algorithms, "Comma list: mast-exact, match1, match2, agree, caterpillar");
  bench->add_flag("--timing", bo.timing, "Record runtime_ms (output is then not reproducible)");
  bench->add_flag("--floor", bo.floor, "Tabulate mast(n) by full enumeration instead");
  bench->add_option("--threads", bo.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, g);
    if (mast->parsed()) return cmd_mast(o);
    if (m1->parsed()) return cmd_match1(o);
    if (m2->parsed()) return cmd_match2(o);
    if (mm->parsed()) return cmd_match_multi(o);
    if (mab->parsed()) return cmd_match_ab(o, ab);
    if (agree->parsed()) return cmd_agree(o);
    if (dec->parsed()) return cmd_decompose(o);
    if (ver->parsed()) return cmd_verify(o, verify_leaves);
    if (bnd->parsed()) return cmd_bounds(o);
    if (bench->parsed()) return cmd_bench(o, bo);
  } catch (const at::VerificationError& e) {
    std::cerr << "agreetree: verification failed: " << e.what() << "\n";
    return kExitBound;
  } catch (const std::exception& e) {
    std::cerr << "agreetree: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
