#include "desclab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "desclab/quadrature.hpp"
#include "desclab/special.hpp"

namespace desclab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require_params(int m, double rho) {
    if (m < 2) throw std::invalid_argument("need m >= 2");
    if (!(rho > -double(m))) throw std::invalid_argument("need rho > -m");
}

} // namespace

DerivedConstants derive_constants(int m, double rho) {
    require_params(m, rho);
    DerivedConstants c;
    c.m = m;
    c.rho = rho;
    c.theta = 2.0 * m + rho;
    c.chi = (m + rho) / c.theta;
    c.kappa = (m - 1) * c.chi;
    c.nu = (m - 1) * (m + rho) / (m * (m + rho + 1.0));
    c.alpha = 1.0 + c.kappa;
    return c;
}

DerivedConstants uniform_constants(int m) {
    if (m < 2) throw std::invalid_argument("need m >= 2");
    DerivedConstants c;
    c.m = m;
    c.rho = std::numeric_limits<double>::infinity();
    c.theta = std::numeric_limits<double>::infinity();
    c.chi = 1.0;
    c.kappa = double(m - 1);
    c.nu = double(m - 1) / m;
    c.alpha = double(m);
    return c;
}

LimitLaw limit_law(int m, double rho) {
    LimitLaw law;
    law.constants = derive_constants(m, rho);
    const double mr1 = m + rho + 1.0;
    const double g1 = law.constants.nu;
    const double g2 = (m + rho) / (m * mr1) + 1.0;
    const double g3 = (m + rho) / mr1;
    law.gamma_ratio = std::exp(log_gamma(g1) + log_gamma(g2) - log_gamma(g3));
    law.scale = mr1 * (m - 1) / law.constants.theta;
    law.exponent = 1.0 - law.constants.nu;
    law.gamma_shape = double(m) / (m - 1);
    law.prefactor = law.gamma_ratio * std::pow(law.scale, law.exponent);
    return law;
}

double limit_sample(const LimitLaw& law, RngStream& stream) {
    const double g = sample_gamma(stream, law.gamma_shape, 1.0);
    if (g == 0.0) return 0.0;
    return law.gamma_ratio * std::pow(law.scale * g, law.exponent);
}

double limit_moment(const LimitLaw& law, double p) {
    if (p < 0.0) throw std::invalid_argument("limit_moment: need p >= 0");
    if (p == 0.0) return 1.0;
    return std::pow(law.prefactor, p) *
           std::exp(log_gamma(p * law.exponent + law.gamma_shape) -
                    log_gamma(law.gamma_shape));
}

std::vector<double> limit_reference_samples(const LimitLaw& law, int64_t count,
                                            RngStream& stream) {
    std::vector<double> out(count);
    for (auto& v : out) v = limit_sample(law, stream);
    std::sort(out.begin(), out.end());
    return out;
}

double expected_S(int64_t n, int64_t k, int m, double rho) {
    require_params(m, rho);
    if (k < 1 || k > n - 1) throw std::invalid_argument("expected_S: need 1 <= k <= n-1");
    const double theta = 2.0 * m + rho;
    const double u = (3.0 * m + rho) / theta;
    const double v = 2.0 * m / theta;
    return std::exp(log_gamma(double(n) - u) - log_gamma(double(n) - v) +
                    log_gamma(double(k) + 1.0 - v) - log_gamma(double(k) + 1.0 - u));
}

double expected_phi(int64_t k, int m, double rho) {
    require_params(m, rho);
    if (k < 1) throw std::invalid_argument("expected_phi: need k >= 1");
    if (k == 1) return m;
    // product over i in [2,k] of (i + a)/(i - b) with
    // a = ((m-1)(m+rho) - 2m)/theta, b = 2m/theta
    const double theta = 2.0 * m + rho;
    const double a = ((m - 1.0) * (m + rho) - 2.0 * m) / theta;
    const double b = 2.0 * m / theta;
    return double(m) * std::exp(log_gamma(double(k) + 1.0 + a) + log_gamma(2.0 - b) -
                                log_gamma(double(k) + 1.0 - b) - log_gamma(2.0 + a));
}

double phi_growth_constant(int m, double rho) {
    require_params(m, rho);
    const double theta = 2.0 * m + rho;
    const double a = ((m - 1.0) * (m + rho) - 2.0 * m) / theta;
    const double b = 2.0 * m / theta;
    return double(m) * std::exp(log_gamma(2.0 - b) - log_gamma(2.0 + a));
}

std::pair<double, double> expected_beta_moments(int64_t i, int m, double rho) {
    require_params(m, rho);
    if (i < 2) throw std::invalid_argument("expected_beta_moments: need i >= 2");
    const double theta = 2.0 * m + rho;
    const double d = theta * double(i) - 2.0 * m;
    const double mean = (m + rho) / d;
    const double second = (m + rho + 1.0) * (m + rho) / ((d + 1.0) * d);
    return {mean, second};
}

double limit_curve_Y(double t, double xi, int m, double rho) {
    const DerivedConstants c = derive_constants(m, rho);
    if (t <= 0.0) throw std::invalid_argument("limit_curve_Y: need t > 0");
    const double mr1 = m + rho + 1.0;
    const double z = (mr1 / c.theta) * xi * std::pow(t, -c.alpha);
    return c.theta * t * std::expm1(std::log1p(z) / mr1);
}

double limit_curve_W(double t, double xi, int m, double rho) {
    const DerivedConstants c = derive_constants(m, rho);
    if (t <= 0.0) throw std::invalid_argument("limit_curve_W: need t > 0");
    const double mr1 = m + rho + 1.0;
    const double z = (mr1 / c.theta) * xi * std::pow(t, -c.alpha);
    return c.theta * std::pow(t, c.alpha) * std::expm1(std::log1p(z) / mr1);
}

namespace {

double mean_curve(double t, int m, double rho, bool y_scaling) {
    require_params(m, rho);
    if (t <= 0.0) throw std::invalid_argument("mean_curve: need t > 0");
    const double shape = double(m) / (m - 1);
    const double scale = double(m - 1);
    const double upper = gamma_quantile(1.0 - 1e-12, shape, scale);
    const auto integrand = [&](double xi) {
        const double curve = y_scaling ? limit_curve_Y(t, xi, m, rho)
                                       : limit_curve_W(t, xi, m, rho);
        return curve * gamma_pdf(xi, shape, scale);
    };
    QuadResult q = integrate(integrand, 0.0, upper, 1e-12, 1e-9);
    // curve(xi) <= xi * max(1, t^{1-alpha}), so the discarded tail is below
    // the truncated gamma mean; negligible at the 1e-12 quantile
    return q.value;
}

} // namespace

double mean_curve_Y(double t, int m, double rho) {
    return mean_curve(t, m, rho, true);
}

double mean_curve_W(double t, int m, double rho) {
    return mean_curve(t, m, rho, false);
}

double ode_closed(double t, double c, int m, double rho) {
    require_params(m, rho);
    if (t <= 0.0) throw std::invalid_argument("ode_closed: need t > 0");
    const DerivedConstants k = derive_constants(m, rho);
    const double ta = std::pow(t, k.alpha);
    const double z = c / ta;
    if (1.0 + z <= 0.0) throw std::domain_error("ode_closed: nonpositive radicand");
    return k.theta * ta * std::expm1(std::log1p(z) / (m + rho + 1.0));
}

double ode_rhs(double t, double f, int m, double rho) {
    require_params(m, rho);
    if (t <= 0.0) throw std::invalid_argument("ode_rhs: need t > 0");
    const DerivedConstants k = derive_constants(m, rho);
    const double ta = std::pow(t, k.alpha);
    const double g = f / (k.theta * ta);
    if (1.0 + g <= 0.0) throw std::domain_error("ode_rhs: nonpositive base");
    const double pow_term = std::expm1(-(m + rho) * std::log1p(g));
    return double(m) * std::pow(t, k.alpha - 1.0) *
           (pow_term + k.chi * f / ta);
}

std::pair<double, double> beta_integral_check(double a, double b) {
    if (!(a > -1.0 && a < 0.0))
        throw std::invalid_argument("beta_integral_check: need -1 < a < 0");
    if (!(b > 0.0)) throw std::invalid_argument("beta_integral_check: need b > 0");
    const auto integrand = [a, b](double x) {
        return std::expm1(-b * std::log1p(x)) * std::pow(x, a - 1.0);
    };
    QuadResult q = integrate_to_inf(integrand, 0.0, 1e-9, 1e-9);
    // Gamma(a) for a in (-1,0) through the reflection formula
    const double log_gamma_a =
        std::log(kPi / std::fabs(std::sin(kPi * a))) - log_gamma(1.0 - a);
    const double rhs = double(gamma_sign(a)) *
                       std::exp(log_gamma_a + log_gamma(b - a) - log_gamma(b));
    return {q.value, rhs};
}

std::pair<double, double> lh_integrals(double s, double t, double y, int m,
                                       double rho) {
    require_params(m, rho);
    if (!(s > 0.0) || t < s || y < 0.0)
        throw std::invalid_argument("lh_integrals: need 0 < s <= t and y >= 0");
    if (s == t || y == 0.0) return {0.0, 0.0};
    const DerivedConstants c = derive_constants(m, rho);
    const double mr = m + rho;
    const auto decay = [&](double u) {
        return std::exp(-mr * std::log1p(y / (c.theta * u)));
    };
    const auto h_integrand = [&](double u) { return decay(u) - 1.0 + c.chi * y / u; };
    const auto i_integrand = [&](double u) { return 1.0 - decay(u); };
    QuadResult h = integrate(h_integrand, s, t, 1e-12, 1e-9);
    QuadResult i = integrate(i_integrand, s, t, 1e-12, 1e-9);
    return {h.value, i.value};
}

double m1_drift(double rho) {
    if (!(rho > -1.0)) throw std::invalid_argument("m1_drift: need rho > -1");
    return (1.0 + rho) / (2.0 + rho);
}

} // namespace desclab
