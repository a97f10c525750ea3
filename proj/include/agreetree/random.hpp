#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace agreetree {

/// Seedable generator with a fully specified output sequence.
///
/// The engine is `std::mt19937_64` (its output is fixed by the standard). The
/// standard distributions are not, so bounded draws use rejection sampling on
/// the raw 64-bit output: `below(n)` rejects values >= 2^64 - (2^64 mod n) and
/// returns `x mod n`. Any reimplementation of those two pieces reproduces every
/// generated tree exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    while (true) {
      std::uint64_t x = engine_();
      if (x >= limit) return x % n;
    }
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Fisher-Yates, walking from the back.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace agreetree
