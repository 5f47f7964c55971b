#pragma once

namespace sparse_recover::special {

// P(Z > x) for standard normal Z.
double gaussian_upper_tail(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Quantile of the chi-square law with nu degrees of freedom, u in (0, 1).
double chi_squared_quantile(double nu, double u);

// chi-square density with nu degrees of freedom.
double chi_squared_pdf(double nu, double x);

// Standard normal quantile (rational approximation, ~1e-9 absolute).
double gaussian_quantile(double u);

}  // namespace sparse_recover::special
