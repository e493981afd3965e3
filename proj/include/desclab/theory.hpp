#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "desclab/rng.hpp"

namespace desclab {

// Constants attached to a parameter pair (m, rho):
//   theta = 2m + rho            total-weight growth rate
//   chi   = (m + rho) / theta   urn-proportion exponent
//   kappa = (m - 1) chi         growth rate of the normalizing product
//   nu    = kappa / (1 + kappa) growth exponent of the descendant count
//   alpha = 1 + kappa = 1 / (1 - nu)
struct DerivedConstants {
    int m = 0;
    double rho = 0.0;
    double nu = 0.0;
    double chi = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
    double kappa = 0.0;
};

DerivedConstants derive_constants(int m, double rho);

// rho -> infinity limit of the constants; governs the uniform-attachment
// scalings (chi = 1, kappa = m-1, nu = (m-1)/m)
DerivedConstants uniform_constants(int m);

// The distributional limit of X / n^nu: gamma_ratio * (scale * g)^exponent
// with g ~ Gamma(gamma_shape, 1).  prefactor folds the scale into the
// constant, so the same variable is prefactor * g^exponent.
struct LimitLaw {
    DerivedConstants constants;
    double gamma_ratio = 0.0;  // ratio of the three Gamma factors
    double scale = 0.0;        // (m+rho+1)(m-1)/theta
    double exponent = 0.0;     // 1 - nu
    double gamma_shape = 0.0;  // m/(m-1)
    double prefactor = 0.0;    // gamma_ratio * scale^exponent
};

LimitLaw limit_law(int m, double rho);

double limit_sample(const LimitLaw& law, RngStream& stream);
double limit_moment(const LimitLaw& law, double p);

// `count` sorted draws of the limit variable, for KS references
std::vector<double> limit_reference_samples(const LimitLaw& law, int64_t count,
                                            RngStream& stream);

// E prod_{j=k+1}^{n-1} (1 - B_j), evaluated as a Gamma ratio in log space
double expected_S(int64_t n, int64_t k, int m, double rho);

// E Phi_k = m * prod_{i=2}^{k} E(1 + (m-1) B_i), exact Gamma-ratio form
double expected_phi(int64_t k, int m, double rho);

// limit of expected_phi(k) / k^kappa
double phi_growth_constant(int m, double rho);

// (E B_i, E B_i^2) for B_i ~ Beta(m+rho, (2i-3)m+(i-1)rho)
std::pair<double, double> expected_beta_moments(int64_t i, int m, double rho);

// limit curve of n^{-nu} Y_{t n^nu}: theta*t*((1+s*xi*t^-alpha)^{1/(m+rho+1)}-1)
// evaluated pointwise at xi
double limit_curve_Y(double t, double xi, int m, double rho);
// limit curve of n^{-kappa} W_{t n^nu} divided by the product-limit variable:
// same expression with t^alpha in front; increases to xi as t grows
double limit_curve_W(double t, double xi, int m, double rho);

// expectations of the curves above over xi ~ Gamma(m/(m-1), m-1), by
// quadrature against the gamma density
double mean_curve_Y(double t, int m, double rho);
double mean_curve_W(double t, int m, double rho);

// closed-form solution f(t) = theta t^alpha ((1 + c t^-alpha)^{1/(m+rho+1)} - 1)
double ode_closed(double t, double c, int m, double rho);
// right-hand side m t^{alpha-1} ((1 + f/(theta t^alpha))^{-(m+rho)} - 1 + chi f / t^alpha)
double ode_rhs(double t, double f, int m, double rho);

// lhs: quadrature of integral_0^inf ((1+x)^-b - 1) x^{a-1} dx for -1 < a < 0;
// rhs: Gamma(a)Gamma(b-a)/Gamma(b) via reflection
std::pair<double, double> beta_integral_check(double a, double b);

// the two deterministic integrals the centered/raw indicator sums converge to:
//   H: integral_s^t ( (1+y/(theta u))^-(m+rho) - 1 + chi y / u ) du
//   I: integral_s^t ( 1 - (1+y/(theta u))^-(m+rho) ) du
std::pair<double, double> lh_integrals(double s, double t, double y, int m,
                                       double rho);

// drift of the tree case: X / log n -> (1+rho)/(2+rho)
double m1_drift(double rho);

} // namespace desclab
