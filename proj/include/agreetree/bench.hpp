#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "agreetree/bounds.hpp"
#include "agreetree/decompose.hpp"
#include "agreetree/error.hpp"
#include "agreetree/exactmast.hpp"
#include "agreetree/generators.hpp"
#include "agreetree/matchers.hpp"
#include "agreetree/random.hpp"

namespace agreetree::bench {

inline const std::vector<std::string>& algorithms() {
  static const std::vector<std::string> names{"mast-exact", "match1", "match2", "agree", "caterpillar"};
  return names;
}

/// Fixed-precision decimal, so reruns print identical bytes.
inline std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

/// RFC 4180: quote fields holding a comma, quote or line break; double quotes.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct TrialRecord {
  int n = 0;
  std::string model;
  std::uint64_t seed = 0;
  std::string algorithm;
  double delta = 0.0;
  std::size_t result_size = 0;
  double bound_value = 0.0;
  std::optional<std::size_t> exact_size;
  std::optional<double> runtime_ms;
  bool certificate_ok = false;

  bool bound_met() const { return GuaranteeReport{algorithm, delta, bound_value, result_size}.met(); }

  auto key() const { return std::tie(n, model, algorithm, seed); }
};

inline std::string csv_header() {
  return "n,model,seed,algorithm,delta,result_size,bound_value,exact_size,runtime_ms,certificate_ok";
}

inline std::string to_csv(const TrialRecord& r) {
  std::string out;
  out += std::to_string(r.n) + ",";
  out += csv_field(r.model) + ",";
  out += std::to_string(r.seed) + ",";
  out += csv_field(r.algorithm) + ",";
  out += fixed(r.delta) + ",";
  out += std::to_string(r.result_size) + ",";
  out += fixed(r.bound_value) + ",";
  out += (r.exact_size ? std::to_string(*r.exact_size) : std::string()) + ",";
  out += (r.runtime_ms ? fixed(*r.runtime_ms, 3) : std::string()) + ",";
  out += r.certificate_ok ? "true" : "false";
  return out;
}

/// Trials with n up to this size also record the exact MAST.
inline constexpr int kExactLimit = 64;

inline int log2_exact(int n, const std::string& algorithm) {
  int m = 0;
  while ((1 << m) < n) ++m;
  if ((1 << m) != n) throw PreconditionError(algorithm + " trials need n to be a power of two, got " + std::to_string(n));
  return m;
}

inline std::vector<Label> shuffled_labels(std::size_t count, Rng& rng) {
  std::vector<Label> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = static_cast<Label>(i + 1);
  rng.shuffle(v);
  return v;
}

/// One trial. Both trees are drawn from Rng(seed); `delta` <= 0 selects the
/// algorithm's optimal delta. Runtime is recorded only when `timing` is set,
/// since it would break byte-identical reruns.
inline TrialRecord run_trial(int n, Model model, std::uint64_t seed, const std::string& algorithm, double delta,
                             bool timing) {
  TrialRecord rec;
  rec.n = n;
  rec.model = to_string(model);
  rec.seed = seed;
  rec.algorithm = algorithm;
  Rng rng(seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (algorithm == "mast-exact") {
      const UnrootedTree a = random_unrooted(n, model, rng), b = random_unrooted(n, model, rng);
      const MastResult r = mast_unrooted(a, b);
      rec.result_size = r.size;
      rec.bound_value = 1.0;
      rec.exact_size = r.size;
    } else if (algorithm == "match1") {
      rec.delta = delta > 0 ? delta : bounds::optimal_delta_match1().delta;
      const int m = log2_exact(n, algorithm);
      const RootedTree a = gen_balanced(m), b = random_rooted(n, model, rng);
      const Match1Result r = match1(a, b, rec.delta);
      rec.result_size = r.leaves.size();
      rec.bound_value = r.report.bound_value;
      if (n <= kExactLimit) rec.exact_size = mast_rooted(a, b).size;
    } else if (algorithm == "match2") {
      rec.delta = delta > 0 ? delta : bounds::optimal_delta_match2().delta;
      const int m = log2_exact(n, algorithm);
      const RootedTree a = balanced_with_order(m, shuffled_labels(n, rng));
      const RootedTree b = balanced_with_order(m, shuffled_labels(n, rng));
      const Match2Result r = match2(a, b, rec.delta);
      rec.result_size = r.leaves.size();
      rec.bound_value = r.report.bound_value;
      if (n <= kExactLimit) rec.exact_size = mast_rooted(a, b).size;
    } else if (algorithm == "agree") {
      const UnrootedTree a = random_unrooted(n, model, rng), b = random_unrooted(n, model, rng);
      const GeneralResult r = agree_general(a, b);
      rec.delta = r.report.delta;
      rec.result_size = r.leaves.size();
      rec.bound_value = r.report.bound_value;
      if (n <= kExactLimit) rec.exact_size = mast_unrooted(a, b).size;
    } else if (algorithm == "caterpillar") {
      const UnrootedTree a = gen_caterpillar(n), b = random_unrooted(n, model, rng);
      const CaterpillarResult r = caterpillar_agree(a, b);
      rec.result_size = r.leaves.size();
      rec.bound_value = r.report.bound_value;
      if (n <= kExactLimit) rec.exact_size = mast_unrooted(a, b).size;
    } else {
      throw PreconditionError("unknown algorithm '" + algorithm + "'");
    }
    rec.certificate_ok = true;
  } catch (const VerificationError&) {
    rec.certificate_ok = false;
  }
  if (timing)
    rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

struct BenchConfig {
  std::vector<int> ns;
  int trials = 10;
  std::vector<Model> models{Model::UniformTopology};
  std::vector<std::string> algorithms;
  std::uint64_t seed_base = 1;
  double delta = 0.0;
  bool timing = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// All trials of the configuration, sorted by (n, model, algorithm, seed).
/// Trial i of each (n, model, algorithm) uses seed seed_base + i.
inline std::vector<TrialRecord> run_bench(const BenchConfig& cfg) {
  struct Job {
    int n;
    Model model;
    std::string algorithm;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int n : cfg.ns)
    for (Model model : cfg.models)
      for (const std::string& alg : cfg.algorithms)
        for (int i = 0; i < cfg.trials; ++i) jobs.push_back({n, model, alg, cfg.seed_base + static_cast<std::uint64_t>(i)});

  std::vector<TrialRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = run_trial(jobs[i].n, jobs[i].model, jobs[i].seed, jobs[i].algorithm, cfg.delta, cfg.timing);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
        next = jobs.size();
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (!first_error.empty()) throw PreconditionError(first_error);
  std::sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) { return a.key() < b.key(); });
  return out;
}

struct SummaryRow {
  int n;
  std::string model;
  std::string algorithm;
  int trials = 0;
  std::size_t min_achieved = 0;
  double mean_achieved = 0.0;
  double bound_value = 0.0;
  int bound_met = 0;
};

inline std::string summary_header() { return "n,model,algorithm,trials,min_achieved,mean_achieved,bound_value,bound_met"; }

inline std::string to_csv(const SummaryRow& s) {
  return std::to_string(s.n) + "," + csv_field(s.model) + "," + csv_field(s.algorithm) + "," + std::to_string(s.trials) +
         "," + std::to_string(s.min_achieved) + "," + fixed(s.mean_achieved) + "," + fixed(s.bound_value) + "," +
         std::to_string(s.bound_met);
}

/// One row per (n, model, algorithm); bound_value is the largest bound seen.
inline std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  std::map<std::tuple<int, std::string, std::string>, SummaryRow> groups;
  for (const TrialRecord& r : records) {
    SummaryRow& s = groups[{r.n, r.model, r.algorithm}];
    if (s.trials == 0) {
      s.n = r.n;
      s.model = r.model;
      s.algorithm = r.algorithm;
      s.min_achieved = r.result_size;
    }
    ++s.trials;
    s.min_achieved = std::min(s.min_achieved, r.result_size);
    s.mean_achieved += static_cast<double>(r.result_size);
    s.bound_value = std::max(s.bound_value, r.bound_value);
    s.bound_met += r.bound_met() ? 1 : 0;
  }
  std::vector<SummaryRow> out;
  for (auto& [key, s] : groups) {
    s.mean_achieved /= s.trials;
    out.push_back(s);
  }
  return out;
}

}  // namespace agreetree::bench
