#pragma once

#include <cstdint>
#include <random>

#include "mlm/mvncdf.hpp"

namespace mlm {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-addressed random stream: (seed, stream) fully determines the
// sequence, independent of thread scheduling. mt19937_64 output is pinned by
// the standard and the normal transform is inverse-CDF, so results are
// reproducible across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ 0x853c49e6748fea9bULL;
    std::uint64_t mixed = s + 0xda3e39cb94b95bdbULL * (stream + 1);
    eng_.seed(splitmix64_next(mixed));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
  double uniform() { return ((eng_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return norm_ppf(uniform()); }

  int sign() { return (eng_() & 1u) ? 1 : -1; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mlm
