#pragma once

// Special functions used by the Dirichlet machinery and the chi-square
// reference distribution: digamma, trigamma, an inverse digamma, and the
// regularized incomplete gamma function. All are accurate to ~1e-12 over
// the argument ranges that occur here (positive concentration parameters,
// chi-square statistics with small df).

namespace dspem {

// log Gamma(x), x > 0. Thin wrapper so callers do not reach into <cmath>.
double log_gamma(double x);

// d/dx log Gamma(x), x > 0.
double digamma(double x);

// d^2/dx^2 log Gamma(x), x > 0.
double trigamma(double x);

// Solve digamma(x) = y for x > 0 (Newton iteration, monotone function).
double digamma_inv(double y);

// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Inverse of the standard normal CDF (Acklam's rational approximation with a
// Halley polish; ~1e-15 over (0, 1)).
double normal_quantile(double p);

// log of the multivariate beta function B(alpha) = prod Gamma(a_i) / Gamma(sum a_i).
double log_multivariate_beta(const double* alpha, int n);

}  // namespace dspem
