#include "quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sparse_recover::testing {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int k) {
  if (k < 1) throw std::invalid_argument("gauss_legendre: k must be >= 1");
  std::vector<double> nodes(static_cast<std::size_t>(k));
  std::vector<double> weights(static_cast<std::size_t>(k));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < k; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_k.
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(k) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
      double p0 = 1.0, p1 = x;
      for (int j = 1; j < k; ++j) {
        double p2 = ((2.0 * j + 1.0) * x * p1 - static_cast<double>(j) * p0) /
                    (static_cast<double>(j) + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(k) * (x * p1 - p0) / (x * x - 1.0);
      double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return {std::move(nodes), std::move(weights)};
}

double psi_quadrature(Index n, Index p, Index s, double a, double sigma, bool clamp) {
  if (n < 1 || s < 1 || 2 * s >= p || !(a > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("psi_quadrature: bad arguments");
  const double nd = static_cast<double>(n);
  const double log_ratio =
      std::log(static_cast<double>(p - s) / static_cast<double>(s));
  const double sqrt2 = std::sqrt(2.0);
  auto upper_tail = [&](double z) { return 0.5 * std::erfc(z / sqrt2); };

  const double lo = 0.0;
  const double hi = nd + 25.0 * std::sqrt(nd) + 50.0;
  const double log_norm = -0.5 * nd * std::log(2.0) - std::lgamma(0.5 * nd);

  auto [nodes, weights] = gauss_legendre(2000);
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = 0.5 * (hi - lo) * nodes[i] + 0.5 * (hi + lo);
    const double w = 0.5 * (hi - lo) * weights[i];
    const double density =
        std::exp((0.5 * nd - 1.0) * std::log(x) - 0.5 * x + log_norm);
    const double r = std::sqrt(x);
    const double t = a * r / 2.0 + sigma * sigma * log_ratio / (a * r);
    double gap = a * r - t;
    if (clamp) gap = std::max(gap, 0.0);
    const double value = static_cast<double>(p - s) * upper_tail(t / sigma) +
                         static_cast<double>(s) * upper_tail(gap / sigma);
    total += w * density * value;
  }
  return total;
}

}  // namespace sparse_recover::testing
