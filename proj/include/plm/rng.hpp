#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "common.hpp"

namespace plm {

// splitmix64: advances `state` and returns a mixed 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic random stream addressed by up to four 64-bit coordinates
// (seed, step, salt, replica). Identical coordinates give identical output on
// every platform: mt19937_64 is fully specified by the standard and all value
// conversions below are hand-rolled rather than left to std distributions.
class Stream {
 public:
  explicit Stream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                  std::uint64_t d = 0) {
    std::uint64_t s = 0x243f6a8885a308d3ull;  // fixed fold-in base
    for (std::uint64_t part : {a, b, c, d}) {
      s ^= part + 0x9e3779b97f4a7c15ull + (s << 12) + (s >> 4);
      s = splitmix64(s), s = splitmix64(s);
    }
    gen_.seed(s);
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0,1) with 53 significant bits.
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0,n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw RangeError("Stream::below: bound must be positive");
    std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Fisher-Yates; identical seed gives an identical permutation.
  template <class It>
  void shuffle(It first, It last) {
    auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      auto j = static_cast<decltype(i)>(below(static_cast<std::uint64_t>(i) + 1));
      auto tmp = first[i];
      first[i] = first[j];
      first[j] = tmp;
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Stream salts separating the independent random roles of a run.
namespace salt {
inline constexpr std::uint64_t storage_step = 0x53544f52ull;  // per-step storage replica noise
inline constexpr std::uint64_t recall_step = 0x5245434cull;   // per-step recall replica noise
inline constexpr std::uint64_t sweep_order = 0x53485546ull;   // pretraining sweep shuffles
inline constexpr std::uint64_t net_storage = 0x494e4954ull;   // storage init
inline constexpr std::uint64_t net_recall = 0x494e4932ull;    // recall init
}  // namespace salt

}  // namespace plm
