#pragma once

#include <cstdint>

namespace desclab {

// log|Gamma(x)|, Lanczos approximation, reflection for x < 0.5.
// Relative error below 1e-13 on the positive axis.
double log_gamma(double x);

// sign of Gamma(x); 0 at the poles
int gamma_sign(double x);

// regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double gamma_cdf(double x, double shape, double scale = 1.0);
double gamma_pdf(double x, double shape, double scale = 1.0);
double gamma_quantile(double prob, double shape, double scale = 1.0);

// regularized incomplete beta I_x(a,b)
double beta_inc(double a, double b, double x);
double beta_cdf(double x, double a, double b);

// upper tail of the chi-square distribution with dof degrees of freedom
double chi_square_sf(double statistic, double dof);

} // namespace desclab
