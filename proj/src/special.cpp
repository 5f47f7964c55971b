#include "sparse_recover/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparse_recover::special {

namespace {

// Series expansion of P(a, x), effective for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), effective for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gaussian_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_squared_pdf(double nu, double x) {
  if (x <= 0.0) return 0.0;
  double h = nu / 2.0;
  return std::exp((h - 1.0) * std::log(x) - x / 2.0 - h * std::log(2.0) -
                  std::lgamma(h));
}

double gaussian_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("gaussian_quantile: u must lie in (0, 1)");
  // Acklam's rational approximation with one Halley polish step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    double q = u - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  double g = std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - e * g / (1.0 + x * e * g / 2.0);
}

double chi_squared_quantile(double nu, double u) {
  if (!(nu > 0.0)) throw std::invalid_argument("chi_squared_quantile: nu must be positive");
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("chi_squared_quantile: u must lie in (0, 1)");
  // Wilson-Hilferty start, then guarded Newton on P(nu/2, x/2) = u.
  double z = gaussian_quantile(u);
  double f = 2.0 / (9.0 * nu);
  double cube = 1.0 - f + z * std::sqrt(f);
  double x = nu * cube * cube * cube;
  if (!(x > 0.0) || !std::isfinite(x)) x = nu;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    double err = gamma_p(nu / 2.0, x / 2.0) - u;
    if (err > 0.0)
      hi = x;
    else
      lo = x;
    double pdf = chi_squared_pdf(nu, x);
    double step = pdf > 0.0 ? err / pdf : 0.0;
    double next = x - step;
    if (!(next > lo && (next < hi))) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : (lo > 0.0 ? 2.0 * lo : 1.0);
    }
    if (std::abs(next - x) <= 1e-14 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

}  // namespace sparse_recover::special
