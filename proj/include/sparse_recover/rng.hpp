#pragma once

#include <cstdint>
#include <random>

#include "sparse_recover/types.hpp"

namespace sparse_recover::rng {

// SplitMix64 round; used to derive independent stream seeds.
std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id);

// Deterministic random stream. All transforms are written out so the
// byte-for-byte draw sequence depends only on the seed, not on the
// standard library's distribution implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}
  static Stream derived(std::uint64_t seed, std::uint64_t stream_id) {
    return Stream(mix(seed, stream_id));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform_open();
  double uniform(double lo, double hi);
  // Integer uniform on [0, bound).
  Index uniform_index(Index bound);

  double normal();
  double laplace();
  double chi_squared(double nu);
  double student_t(int df);

  // Random size-k subset of [0, p), ascending order.
  std::vector<Index> subset(Index p, Index k);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparse_recover::rng
