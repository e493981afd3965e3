#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "desclab/quadrature.hpp"

using namespace desclab;

TEST_CASE("polynomials and smooth integrands") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0,
                    3.14159265358979323846)
              .value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("integrable endpoint singularity") {
    // int_0^1 x^{-1/2} dx = 2
    const auto q = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0,
                             1.0, 1e-10, 1e-9);
    CHECK(q.value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("semi-infinite tail via reciprocal substitution") {
    // int_0^inf e^{-x} = 1
    CHECK(integrate_to_inf([](double x) { return std::exp(-x); }, 0.0).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    // int_1^inf x^{-2} = 1
    CHECK(integrate_to_inf([](double x) { return 1.0 / (x * x); }, 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    // int_0^inf x e^{-x} = 1 (peak away from zero)
    CHECK(integrate_to_inf([](double x) { return x * std::exp(-x); }, 0.0)
              .value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("oscillatory integrand needs refinement") {
    // int_0^1 sin(40 x) dx = (1 - cos 40)/40
    const double ref = (1.0 - std::cos(40.0)) / 40.0;
    CHECK(integrate([](double x) { return std::sin(40.0 * x); }, 0.0, 1.0)
              .value == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("error reporting") {
    const auto q = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(q.error < 1e-8);
    CHECK(q.evaluations >= 15);
    CHECK_THROWS(integrate([](double) { return 0.0; }, 1.0, 0.0));
}
