#include "sparse_recover/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace sparse_recover {

ProblemInstance make_problem(Index n, Index p, Index s, double a,
                             double sigma, Index n1) {
  std::ostringstream bad;
  auto complain = [&bad](const std::string& msg) {
    if (bad.tellp() > 0) bad << "; ";
    bad << msg;
  };
  if (n < 2) complain("n must be at least 2");
  if (p < 1) complain("p must be at least 1");
  if (s < 1 || s > p) complain("s must satisfy 1 <= s <= p");
  if (!(a > 0.0) || !std::isfinite(a)) complain("a must be positive and finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) complain("sigma must be nonnegative and finite");
  if (n1 < 1 || n1 >= n) complain("n1 must satisfy 1 <= n1 < n");
  if (bad.tellp() > 0) throw std::invalid_argument("make_problem: " + bad.str());
  return ProblemInstance{n, p, s, a, sigma, n1, n - n1};
}

bool membership_omega(const Vector& beta, Index s, double a) {
  Index nonzero = 0;
  for (Index i = 0; i < beta.size(); ++i) {
    if (beta[i] != 0.0) {
      ++nonzero;
      if (std::abs(beta[i]) < a) return false;
    }
  }
  return nonzero <= s;
}

SupportMask SupportMask::from_bits(std::vector<std::uint8_t> bits) {
  for (auto b : bits) {
    if (b > 1) throw std::invalid_argument("SupportMask entries must be 0 or 1");
  }
  SupportMask mask;
  mask.bits_ = std::move(bits);
  return mask;
}

Index SupportMask::count() const {
  return static_cast<Index>(std::count(bits_.begin(), bits_.end(), 1));
}

SupportMask support_of(const Vector& beta) {
  SupportMask mask(beta.size());
  for (Index i = 0; i < beta.size(); ++i) mask.set(i, beta[i] != 0.0);
  return mask;
}

Index hamming_distance(const SupportMask& lhs, const SupportMask& rhs) {
  if (lhs.size() != rhs.size())
    throw std::invalid_argument("hamming_distance: mask lengths differ");
  Index d = 0;
  for (Index i = 0; i < lhs.size(); ++i) d += lhs.test(i) != rhs.test(i);
  return d;
}

SplitScheme SplitScheme::head(Index n, Index n1) {
  if (n1 < 1 || n1 >= n)
    throw std::invalid_argument("SplitScheme::head: need 1 <= n1 < n");
  SplitScheme scheme;
  scheme.first.resize(static_cast<std::size_t>(n1));
  scheme.second.resize(static_cast<std::size_t>(n - n1));
  std::iota(scheme.first.begin(), scheme.first.end(), Index{0});
  std::iota(scheme.second.begin(), scheme.second.end(), n1);
  return scheme;
}

void SplitScheme::validate(Index n) const {
  if (first.empty()) throw std::invalid_argument("split: first part is empty");
  if (second.empty()) throw std::invalid_argument("split: second part is empty");
  std::unordered_set<Index> seen;
  for (const auto* part : {&first, &second}) {
    for (Index i : *part) {
      if (i < 0 || i >= n)
        throw std::invalid_argument("split: row index out of range");
      if (!seen.insert(i).second)
        throw std::invalid_argument("split: row index repeated across parts");
    }
  }
}

std::pair<DatasetView, DatasetView> split_sample(const Dataset& data,
                                                 const SplitScheme& scheme) {
  if (data.X.rows() != data.Y.size())
    throw std::invalid_argument("split_sample: X row count and Y length differ");
  scheme.validate(data.rows());
  return {DatasetView(data, scheme.first), DatasetView(data, scheme.second)};
}

}  // namespace sparse_recover
