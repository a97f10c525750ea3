#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "agreetree/error.hpp"

// All logarithms in this library are base 2.

namespace agreetree::bounds {

inline constexpr double kSlack = 1e-9;

/// Upper end of the delta range in which beta is positive: 1/3 - 1/(3 sqrt 2).
inline double match2_delta_limit() { return 1.0 / 3.0 - 1.0 / (3.0 * std::sqrt(2.0)); }

namespace detail {

inline void require_open(double x, double lo, double hi, const char* what) {
  if (!(x > lo && x < hi))
    throw PreconditionError(std::string(what) + " must lie in (" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "), got " + std::to_string(x));
}

}  // namespace detail

/// alpha = (1 + log(1 - delta)) / (1 - log delta), delta in (0, 1/2).
inline double alpha(double delta) {
  detail::require_open(delta, 0.0, 0.5, "delta");
  return (1.0 + std::log2(1.0 - delta)) / (1.0 - std::log2(delta));
}

/// beta = (1 + 2 log(1 - 3 delta)) / (log(1 - 3 delta) - log delta).
inline double beta(double delta) {
  detail::require_open(delta, 0.0, match2_delta_limit(), "delta");
  const double l = std::log2(1.0 - 3.0 * delta);
  return (1.0 + 2.0 * l) / (l - std::log2(delta));
}

/// Lower bound on the Match1 output for a balanced tree of height m against a
/// tree on t of its leaves: (m log(1 - delta) + log t) / (1 - log delta).
inline double match1_bound(int m, std::size_t t, double delta) {
  if (m < 0 || t < 1) throw PreconditionError("match1_bound needs m >= 0 and t >= 1");
  detail::require_open(delta, 0.0, 0.5, "delta");
  return (m * std::log2(1.0 - delta) + std::log2(static_cast<double>(t))) / (1.0 - std::log2(delta));
}

/// g(m1, m2, t) = ((m1 + m2) log(1 - 3 delta) + log t) / (log(1 - 3 delta) - log delta).
inline double match2_exponent(int m1, int m2, std::size_t t, double delta) {
  if (m1 < 0 || m2 < 0 || t < 1) throw PreconditionError("match2 bound needs m1, m2 >= 0 and t >= 1");
  detail::require_open(delta, 0.0, 0.25, "delta");
  const double l = std::log2(1.0 - 3.0 * delta);
  return ((m1 + m2) * l + std::log2(static_cast<double>(t))) / (l - std::log2(delta));
}

/// max(1, 2^g(m1, m2, t)).
inline double match2_bound(int m1, int m2, std::size_t t, double delta) {
  return std::max(1.0, std::exp2(match2_exponent(m1, m2, t, delta)));
}

/// Additive loss c = (log 3 - 1) / (log(1 - 3 delta) - log delta) for two
/// balanced unrooted trees with a vertex center.
inline double t2_constant(double delta) {
  detail::require_open(delta, 0.0, 0.25, "delta");
  return (std::log2(3.0) - 1.0) / (std::log2(1.0 - 3.0 * delta) - std::log2(delta));
}

/// 2^(beta m - c): guarantee for two unrooted balanced trees of class B_m or C_m.
inline double match2_unrooted_bound(int m, double delta) {
  return std::exp2(beta(delta) * m - t2_constant(delta));
}

/// alpha_k = (1 + k log(1 - delta)) / (1 - log delta).
inline double alpha_k(double k, double delta) {
  detail::require_open(delta, 0.0, 0.5, "delta");
  return (1.0 + k * std::log2(1.0 - delta)) / (1.0 - std::log2(delta));
}

/// beta_k = (1 + 2k log(1 - 3 delta)) / (log(1 - 3 delta) - log delta).
inline double beta_k(double k, double delta) {
  detail::require_open(delta, 0.0, 0.25, "delta");
  const double l = std::log2(1.0 - 3.0 * delta);
  return (1.0 + 2.0 * k * l) / (l - std::log2(delta));
}

/// Delta at which the alpha_k numerator 1 + k log(1 - delta) equals 1/2.
inline double alpha_k_delta(double k) {
  if (!(k > 0)) throw PreconditionError("k must be positive");
  return std::min(1.0 - std::exp2(-0.5 / k), 0.49);
}

/// Delta at which the beta_k numerator 1 + 2k log(1 - 3 delta) equals 1/2.
inline double beta_k_delta(double k) {
  if (!(k > 0)) throw PreconditionError("k must be positive");
  return std::min((1.0 - std::exp2(-0.25 / k)) / 3.0, 0.24);
}

struct Optimum {
  double delta;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
inline Optimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                       double tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2.0;
  return {x, f(x)};
}

/// Uniform grid search followed by successive grid refinement around the best point.
inline Optimum grid_maximize(const std::function<double(double)>& f, double lo, double hi, int steps = 1000,
                             int rounds = 6) {
  Optimum best{lo, -std::numeric_limits<double>::infinity()};
  for (int round = 0; round < rounds; ++round) {
    const double h = (hi - lo) / steps;
    for (int i = 0; i <= steps; ++i) {
      const double x = lo + i * h;
      const double y = f(x);
      if (y > best.value) best = {x, y};
    }
    lo = std::max(lo, best.delta - h);
    hi = std::min(hi, best.delta + h);
  }
  return best;
}

/// Delta maximizing alpha on (0, 1/2); about (0.1705, 0.2055).
inline Optimum optimal_delta_match1() {
  return golden_section_maximize(alpha, 1e-9, 0.5 - 1e-9);
}

/// Delta maximizing beta on (0, 1/3 - 1/(3 sqrt 2)).
inline Optimum optimal_delta_match2() {
  return golden_section_maximize(beta, 1e-9, match2_delta_limit() - 1e-9);
}

/// Binomial coefficient with exact integer arithmetic (0 when k > n).
inline std::uint64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

inline void require_hk(int h, int k) {
  if (k < 0 || k > h || h > 60) throw PreconditionError("f(h,k) needs 0 <= k <= h <= 60");
}

/// f(h, k): 2^k when h == k or k == 0, else sum_{i=0..k} C(h-i-1, k-i) 2^i.
inline std::uint64_t f_closed(int h, int k) {
  require_hk(h, k);
  if (h == k || k == 0) return std::uint64_t{1} << k;
  std::uint64_t sum = 0;
  for (int i = 0; i <= k; ++i) sum += binomial(h - i - 1, k - i) << i;
  return sum;
}

/// f(h, k) from f(h, k) = f(h-1, k) + f(h-1, k-1), tabulated.
inline std::uint64_t f_recurrence(int h, int k) {
  require_hk(h, k);
  std::vector<std::vector<std::uint64_t>> f(h + 1, std::vector<std::uint64_t>(h + 1, 0));
  for (int hh = 0; hh <= h; ++hh)
    for (int kk = 0; kk <= hh; ++kk)
      f[hh][kk] = (hh == kk || kk == 0) ? (std::uint64_t{1} << kk) : f[hh - 1][kk] + f[hh - 1][kk - 1];
  return f[h][k];
}

/// f(h, min(h, k)): a tree of height at most h has no balanced restriction
/// higher than h.
inline std::uint64_t f_capped(int h, int k) { return f_closed(h, std::min(h, std::max(k, 0))); }

/// base^exp saturating at UINT64_MAX; exact whenever the true value fits.
inline std::uint64_t saturating_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

/// f(h, k) <= (2h)^k. Exact: f(h, k) <= 2^h fits in 64 bits, so a saturated
/// right-hand side still compares correctly.
inline bool fhk_upper(int h, int k) {
  if (k < 1 || k > h) throw PreconditionError("fhk_upper needs 1 <= k <= h");
  return f_closed(h, k) <= saturating_pow(2 * static_cast<std::uint64_t>(h), k);
}

inline void require_n(double n) {
  if (!(n > 2)) throw PreconditionError("n must exceed 2");
}

/// phi(n, a) = (log n)^a / 2.
inline double phi(double n, double a) {
  require_n(n);
  return std::pow(std::log2(n), a) / 2.0;
}

/// psi(n, b) = (log n)^b / log log n.
inline double psi(double n, double b) {
  require_n(n);
  return std::pow(std::log2(n), b) / std::log2(std::log2(n));
}

/// (log n)^psi(n, b): the path length a tree without a high balanced
/// restriction must contain.
inline double path_threshold(double n, double b) { return std::pow(std::log2(n), psi(n, b)); }

/// (alpha* / 2) sqrt(log n) + alpha* log(2/3), alpha* the optimal Match1 constant.
inline double general_bound(double n) {
  require_n(n);
  const double a = optimal_delta_match1().value;
  return a / 2.0 * std::sqrt(std::log2(n)) + a * std::log2(2.0 / 3.0);
}

/// Caterpillar agreement guarantee: log(n) / 3.
inline double caterpillar_bound(double n) { return std::log2(n) / 3.0; }

}  // namespace agreetree::bounds

namespace agreetree {

/// Achieved size against the guarantee that applied to a run. Guarantees below 1
/// are clamped to 1 since any common leaf is an agreement set.
struct GuaranteeReport {
  std::string algorithm;
  double delta = 0.0;
  double bound_value = 0.0;
  std::size_t achieved = 0;

  double clamped_bound() const { return std::max(1.0, bound_value); }
  bool met() const { return static_cast<double>(achieved) >= std::ceil(clamped_bound() - bounds::kSlack); }
};

}  // namespace agreetree
