#include "sparse_recover/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparse_recover/special.hpp"

namespace sparse_recover::rng {

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Stream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

Index Stream::uniform_index(Index bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_index: bound must be positive");
  return static_cast<Index>(
      (static_cast<unsigned __int128>(next_u64()) *
       static_cast<unsigned __int128>(bound)) >> 64);
}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform_open();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double Stream::laplace() {
  double u = uniform_open() - 0.5;
  return (u < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(u)) / std::sqrt(2.0);
}

double Stream::chi_squared(double nu) {
  return special::chi_squared_quantile(nu, uniform_open());
}

double Stream::student_t(int df) {
  if (df < 1) throw std::invalid_argument("student_t: df must be at least 1");
  return normal() / std::sqrt(chi_squared(df) / df);
}

std::vector<Index> Stream::subset(Index p, Index k) {
  if (k < 0 || k > p) throw std::invalid_argument("subset: need 0 <= k <= p");
  std::vector<Index> pool(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < k; ++i) {
    Index j = i + uniform_index(p - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace sparse_recover::rng
