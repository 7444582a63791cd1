#pragma once

#include <cstdint>

namespace pindot {

/// Counter-based generator: value i of stream `seed` is splitmix64(seed, i), so
/// disjoint counter ranges can be drawn independently and in any order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) : key_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)), ctr_(counter) {}

  std::uint64_t next() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * ctr_++); }
  /// Uniform in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace pindot
