#pragma once
// Scalar special functions needed by the closed-form laws and the
// goodness-of-fit machinery.

#include <cstddef>

namespace stakelab {

// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a).
double gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

// Riemann zeta(s) for s > 1.
double zeta(double s);

// Asymptotic Kolmogorov distribution Q(c) = P(sqrt(n) D_n > c), and the
// critical value c with Q(c) = alpha.
double kolmogorov_q(double c);
double ks_critical(double alpha, std::size_t n);

}  // namespace stakelab
