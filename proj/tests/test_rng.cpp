#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "desclab/rng.hpp"
#include "desclab/special.hpp"
#include "desclab/stats.hpp"

using namespace desclab;

TEST_CASE("philox known answers") {
    // reference vectors for the 10-round 4x32 variant
    {
        const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        const auto out = philox4x32_10(
            {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
            {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        const auto out = philox4x32_10(
            {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
            {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("stream determinism and separation") {
    RngStream a(12345, 7);
    RngStream b(12345, 7);
    for (int i = 0; i < 10000; ++i) CHECK(a.next_u64() == b.next_u64());

    // a rebuilt stream replays from the start
    RngStream c(12345, 7);
    RngStream d = make_stream(12345, 7);
    CHECK(c.next_u64() == d.next_u64());

    // distinct stream ids decorrelate: two-sample KS on uniforms
    RngStream s0(99, 0), s1(99, 1);
    std::vector<double> u0(10000), u1(10000);
    for (auto& v : u0) v = s0.next_u01();
    for (auto& v : u1) v = s1.next_u01();
    std::sort(u0.begin(), u0.end());
    std::sort(u1.begin(), u1.end());
    const double ks = two_sample_ks(u0, u1);
    // alpha = 0.001 critical value for n = m = 1e4
    const double crit = 1.95 * std::sqrt(2.0 / 10000.0);
    CHECK(ks < crit);
}

TEST_CASE("stream serialization round trip") {
    const uint64_t seed = 0xDEADBEEFCAFEull, id = 42;
    RngStream a(seed, id);
    // serialize the identifying pair, rebuild, expect the same draws
    const uint64_t seed_copy = a.master_seed();
    const uint64_t id_copy = a.stream_id();
    RngStream b(seed_copy, id_copy);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform support") {
    RngStream s(1, 1);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.next_u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = s.next_u01_oo();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("gamma sampler moments and distribution") {
    RngStream s(2024, 0);
    std::vector<double> draws(1000000);
    for (auto& v : draws) v = sample_gamma(s, 2.0, 1.0);
    for (const double v : draws) REQUIRE(v > 0.0);
    const SummaryStats st = summarize(draws);
    // Gamma(2,1): mean 2, variance 2
    CHECK(std::fabs(st.mean - 2.0) < 4.0 * st.std_error);
    CHECK(std::fabs(st.variance - 2.0) < 0.05);

    // KS against the incomplete-gamma CDF at a shape below one
    RngStream s2(2024, 1);
    const int n = 100000;
    std::vector<double> small(n);
    for (auto& v : small) v = sample_gamma(s2, 0.7, 1.0);
    std::sort(small.begin(), small.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double F = gamma_cdf(small[size_t(i)], 0.7, 1.0);
        ks = std::max(ks, std::fabs(F - double(i + 1) / n));
        ks = std::max(ks, std::fabs(F - double(i) / n));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("gamma scale parameter") {
    RngStream s(5, 0);
    std::vector<double> draws(200000);
    for (auto& v : draws) v = sample_gamma(s, 2.0, 3.0);
    const SummaryStats st = summarize(draws);
    CHECK(std::fabs(st.mean - 6.0) < 4.0 * st.std_error);
}

TEST_CASE("beta sampler") {
    RngStream bad(1, 1);
    CHECK_THROWS(sample_beta(bad, 0.0, 1.0));
    CHECK_THROWS(sample_beta(bad, 1.0, -2.0));

    RngStream s(77, 0);
    std::vector<double> draws(1000000);
    for (auto& v : draws) v = sample_beta(s, 2.0, 2.0);
    for (const double v : draws) {
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
    const SummaryStats st = summarize(draws);
    CHECK(std::fabs(st.mean - 0.5) < 4.0 * st.std_error);

    // asymmetric case against the incomplete-beta CDF
    RngStream s2(77, 1);
    const int n = 100000;
    std::vector<double> asym(n);
    for (auto& v : asym) v = sample_beta(s2, 0.5, 3.0);
    std::sort(asym.begin(), asym.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double F = beta_cdf(asym[size_t(i)], 0.5, 3.0);
        ks = std::max(ks, std::fabs(F - double(i + 1) / n));
        ks = std::max(ks, std::fabs(F - double(i) / n));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("binomial sampler") {
    RngStream s(3, 0);
    CHECK(sample_binomial(s, 0, 0.3) == 0);
    CHECK(sample_binomial(s, 10, 0.0) == 0);
    CHECK(sample_binomial(s, 10, 1.0) == 10);

    // Bernoulli frequency
    int64_t ones = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) ones += sample_binomial(s, 1, 0.3);
    const double se = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::fabs(double(ones) / n - 0.3) < 4.0 * se);

    // small-mean inversion regime: count 1e4, p 1e-3
    std::vector<double> draws(100000);
    for (auto& v : draws) v = double(sample_binomial(s, 10000, 1e-3));
    const SummaryStats st = summarize(draws);
    CHECK(std::fabs(st.mean - 10.0) < 4.0 * st.std_error);
    const double var_ref = 10000 * 1e-3 * (1 - 1e-3);
    CHECK(std::fabs(st.variance - var_ref) < 0.15);

    // rejection regime: exact CDF comparison at count 500, p 0.3
    std::vector<int64_t> counts(501, 0);
    const int reps = 200000;
    for (int i = 0; i < reps; ++i) ++counts[size_t(sample_binomial(s, 500, 0.3))];
    // one-sample KS against the exact CDF via the incomplete beta:
    // P(X <= k) = I_{1-p}(n-k, k+1)
    double ks = 0.0;
    double cum = 0.0;
    for (int k = 0; k < 500; ++k) {
        cum += double(counts[size_t(k)]) / reps;
        const double F = beta_inc(500.0 - k, k + 1.0, 0.7);
        ks = std::max(ks, std::fabs(cum - F));
    }
    CHECK(ks < 0.005);

    // support bounds in both regimes
    for (int i = 0; i < 1000; ++i) {
        const int64_t z = sample_binomial(s, 50, 0.9);
        REQUIRE(z >= 0);
        REQUIRE(z <= 50);
    }
}

TEST_CASE("beta-binomial matches the two-stage path in law") {
    // same marginal as sampling Beta then Binomial; checked via chi-square
    const double a = 2.0, b = 10.0;
    const int64_t count = 12;
    const int reps = 400000;
    RngStream s1(11, 0), s2(11, 1);
    std::vector<int64_t> direct(size_t(count) + 1, 0);
    std::vector<int64_t> two_stage(size_t(count) + 1, 0);
    for (int i = 0; i < reps; ++i) {
        ++direct[size_t(sample_beta_binomial(s1, count, a, b))];
        const double p = sample_beta(s2, a, b);
        ++two_stage[size_t(sample_binomial(s2, count, p))];
    }
    // exact pmf: C(count,z) B(a+z, b+count-z) / B(a,b)
    std::vector<double> expected(size_t(count) + 1, 0.0);
    for (int64_t z = 0; z <= count; ++z) {
        const double logc = log_gamma(double(count) + 1) -
                            log_gamma(double(z) + 1) -
                            log_gamma(double(count - z) + 1);
        expected[size_t(z)] =
            std::exp(logc + log_gamma(a + double(z)) +
                     log_gamma(b + double(count - z)) - log_gamma(a + b + count) +
                     log_gamma(a + b) - log_gamma(a) - log_gamma(b)) *
            reps;
    }
    const ChiSquareResult c1 = chi_square(direct, expected);
    const ChiSquareResult c2 = chi_square(two_stage, expected);
    CHECK(c1.p_value > 1e-4);
    CHECK(c2.p_value > 1e-4);

    // non-integer shape route
    RngStream s3(11, 2);
    std::vector<double> vals(200000);
    for (auto& v : vals) v = double(sample_beta_binomial(s3, 20, 1.7, 5.3));
    const SummaryStats st = summarize(vals);
    const double mean_ref = 20.0 * 1.7 / (1.7 + 5.3);
    CHECK(std::fabs(st.mean - mean_ref) < 4.0 * st.std_error);

    // large-count log-gamma route
    RngStream s4(11, 3);
    std::vector<double> vals2(100000);
    for (auto& v : vals2) v = double(sample_beta_binomial(s4, 500, 1.7, 40.0));
    const SummaryStats st2 = summarize(vals2);
    const double mean_ref2 = 500.0 * 1.7 / (1.7 + 40.0);
    CHECK(std::fabs(st2.mean - mean_ref2) < 4.0 * st2.std_error);
}

TEST_CASE("beta moments across random urn parameterizations") {
    RngStream meta(2718, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 2 + int(meta.next_u64() % 7);
        const double rho = -double(m) + 0.2 + meta.next_u01() * (m + 6.0);
        const int64_t i = 2 + int64_t(meta.next_u64() % 40);
        const double a = m + rho;
        const double b = (2.0 * i - 3.0) * m + (i - 1.0) * rho;
        const double mean_ref = a / (a + b);
        const double var_ref =
            a * b / ((a + b) * (a + b) * (a + b + 1.0));
        RngStream s(2718, 100 + uint64_t(trial));
        std::vector<double> draws(20000);
        for (auto& v : draws) v = sample_beta(s, a, b);
        const SummaryStats st = summarize(draws);
        CHECK(std::fabs(st.mean - mean_ref) < 4.0 * st.std_error);
        // variance of the sample variance ~ 2 var^2 / n for near-normal data;
        // beta skew is mild here, allow a generous multiple
        const double var_se = var_ref * std::sqrt(2.0 / 20000.0) * 3.0;
        CHECK(std::fabs(st.variance - var_ref) < 4.0 * var_se);
    }
}

TEST_CASE("binomial support over a million mixed draws") {
    RngStream s(31, 0);
    for (int i = 0; i < 1000000; ++i) {
        const int64_t count = int64_t(s.next_u64() % 2000);
        const double p = s.next_u01();
        const int64_t z = sample_binomial(s, count, p);
        if (z < 0 || z > count) {
            REQUIRE(z >= 0);
            REQUIRE(z <= count);
        }
    }
    CHECK(true);
}

TEST_CASE("exponential and normal basics") {
    RngStream s(8, 0);
    std::vector<double> exps(500000);
    for (auto& v : exps) v = sample_exponential(s, 2.0);
    const SummaryStats st = summarize(exps);
    CHECK(std::fabs(st.mean - 0.5) < 4.0 * st.std_error);

    std::vector<double> norms(500000);
    for (auto& v : norms) v = sample_normal(s);
    const SummaryStats ns = summarize(norms);
    CHECK(std::fabs(ns.mean) < 4.0 * ns.std_error);
    CHECK(std::fabs(ns.variance - 1.0) < 0.01);
}
