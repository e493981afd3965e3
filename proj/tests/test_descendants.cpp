#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "desclab/descendants.hpp"
#include "desclab/generators.hpp"
#include "desclab/harness.hpp"
#include "desclab/stats.hpp"
#include "desclab/theory.hpp"

using namespace desclab;

namespace {

ModelParams params_of(Variant v, int m, double rho, int64_t n,
                      uint64_t seed = 7) {
    ModelParams p;
    p.variant = v;
    p.m = m;
    p.rho = rho;
    p.n = n;
    p.master_seed = seed;
    return p;
}

// independent reachability oracle: boolean matrix closure
int64_t closure_count(const Digraph& g) {
    const size_t n = size_t(g.n);
    std::vector<uint8_t> reach(n * n, 0);
    for (size_t v = 0; v < n; ++v) reach[v * n + v] = 1;
    for (int64_t k = 2; k <= g.n; ++k)
        for (int e = 0; e < g.m; ++e)
            reach[size_t(k - 1) * n + size_t(g.target(k, e) - 1)] = 1;
    for (size_t mid = 0; mid < n; ++mid)
        for (size_t i = 0; i < n; ++i)
            if (reach[i * n + mid])
                for (size_t j = 0; j < n; ++j)
                    if (reach[mid * n + j]) reach[i * n + j] = 1;
    int64_t count = 0;
    for (size_t j = 0; j < n; ++j) count += reach[(n - 1) * n + j];
    return count;
}

} // namespace

TEST_CASE("descendant counting boundary cases") {
    RngStream s(1, 0);
    {
        const Digraph g = gen_sequential(params_of(Variant::sequential, 2, 0.0, 1), s);
        CHECK(count_descendants(g) == 1);
    }
    {
        const Digraph g = gen_sequential(params_of(Variant::sequential, 3, 0.0, 2), s);
        CHECK(count_descendants(g) == 2);
    }
}

TEST_CASE("bfs count equals matrix closure on random graphs") {
    RngStream s(2, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int which = int(s.next_u64() % 4);
        const int m = 2 + int(s.next_u64() % 3);
        const double rho = -double(m) * 0.3 + 2.0 * s.next_u01();
        Digraph g;
        if (which == 0)
            g = gen_sequential(params_of(Variant::sequential, m, rho, 50), s);
        else if (which == 1)
            g = gen_polya(params_of(Variant::polya_urn, m, rho, 50), s).first;
        else if (which == 2)
            g = gen_selfloop(params_of(Variant::self_loop, m, std::max(rho, -0.9), 50), s).first;
        else
            g = gen_uniform(m, 50, s);
        CHECK(count_descendants(g) == closure_count(g));
    }
}

TEST_CASE("level recursion boundary cases") {
    RngStream s(3, 0);
    {
        const DescendantTrace t =
            simulate_recursion(params_of(Variant::polya_urn, 2, 0.0, 1), s);
        CHECK(t.x == 1);
    }
    {
        const DescendantTrace t =
            simulate_recursion(params_of(Variant::polya_urn, 2, 0.0, 2), s);
        CHECK(t.x == 2);
    }
    CHECK_THROWS(simulate_recursion(params_of(Variant::sequential, 2, 0.0, 5), s));
    CHECK_THROWS(simulate_recursion(params_of(Variant::self_loop, 2, 0.0, 5), s));
}

TEST_CASE("full trace invariants") {
    RngStream s(4, 0);
    TraceOptions opts;
    opts.depth = TraceOptions::Depth::full;
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 2 + int(s.next_u64() % 3);
        const double rho = -double(m) + 0.4 + 3.0 * s.next_u01();
        const int64_t n = 3 + int64_t(s.next_u64() % 400);
        const bool uniform = trial % 4 == 0;
        const ModelParams p = params_of(
            uniform ? Variant::uniform : Variant::polya_urn, m,
            uniform ? 0.0 : rho, n);
        const DescendantTrace t = simulate_recursion(p, s, opts);

        REQUIRE(int64_t(t.Y.size()) == n);
        CHECK(t.Y[size_t(n - 1)] == m);
        CHECK(t.Y[0] == 0);
        int64_t x_acc = 1;
        for (int64_t k = 1; k <= n - 1; ++k) {
            CHECK(t.Z[size_t(k)] >= 0);
            CHECK(t.Z[size_t(k)] <= t.Y[size_t(k)]);
            CHECK((t.J[size_t(k)] == 1) == (t.Z[size_t(k)] >= 1));
            x_acc += t.J[size_t(k)];
            if (k >= 2)
                CHECK(t.Y[size_t(k - 1)] ==
                      t.Y[size_t(k)] - t.Z[size_t(k)] + m * t.J[size_t(k)]);
        }
        CHECK(t.x == x_acc);
        CHECK(t.x >= 2);
        CHECK(t.x <= n);

        // compensator nonnegative, largest at level zero, zero at the top
        CHECK(t.A[size_t(n - 1)] == 0.0);
        for (int64_t k = 1; k <= n - 1; ++k)
            CHECK(t.A[size_t(k - 1)] >= t.A[size_t(k)]);
        for (int64_t k = 0; k <= n - 1; ++k) {
            CHECK(t.A[size_t(k)] >= 0.0);
            CHECK(t.W[size_t(k)] >= 0.0);
            CHECK(t.W[size_t(k)] ==
                  doctest::Approx(t.Phi[size_t(k)] * double(t.Y[size_t(k)]))
                      .epsilon(1e-12));
            CHECK(t.M[size_t(k)] ==
                  doctest::Approx(t.W[size_t(k)] + t.A[size_t(k)])
                      .epsilon(1e-12));
        }

        // hit-probability accumulation matches the stored curve
        CHECK(t.p0 == doctest::Approx(t.P[0]).epsilon(1e-9));

        // tail statistic consistency against the full arrays
        const DerivedConstants c = t.uniform ? uniform_constants(m)
                                             : derive_constants(m, p.rho);
        const double xi_ref = t.Phi[size_t(t.n1)] * double(t.Y[size_t(t.n1)]) /
                              std::pow(double(n), c.kappa);
        CHECK(t.xi == doctest::Approx(xi_ref).epsilon(1e-9));
        CHECK(t.y_n1 == t.Y[size_t(t.n1)]);
    }
}

TEST_CASE("probe positions reproduce the stored levels") {
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, 5000, 11);
    TraceOptions full_opts;
    full_opts.depth = TraceOptions::Depth::full;
    RngStream s1(11, 0);
    const DescendantTrace full = simulate_recursion(p, s1, full_opts);

    TraceOptions probe_opts;
    probe_opts.depth = TraceOptions::Depth::x_only;
    probe_opts.explicit_beta = true;  // same draw sequence as the full path
    probe_opts.probe_positions = {0.0, 17.0, 17.25, 123.75, 4999.0, 12000.0};
    RngStream s2(11, 0);
    const DescendantTrace probe = simulate_recursion(p, s2, probe_opts);

    CHECK(probe.x == full.x);
    const auto at = [&](double pos) {
        pos = std::min(pos, 4999.0);
        const auto lo = int64_t(pos);
        const double frac = pos - double(lo);
        const double ylo = double(full.Y[size_t(lo)]);
        if (frac == 0.0) return ylo;
        return (1.0 - frac) * ylo + frac * double(full.Y[size_t(lo + 1)]);
    };
    for (size_t i = 0; i < probe_opts.probe_positions.size(); ++i)
        CHECK(probe.y_probes[i] ==
              doctest::Approx(at(probe_opts.probe_positions[i])).epsilon(1e-12));
}

TEST_CASE("integrated-proportion fast path matches the explicit path in law") {
    const int64_t reps = 20000;
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, 3000, 5);
    std::vector<double> fast(size_t(reps), 0.0), slow(size_t(reps), 0.0);
    TraceOptions explicit_opts;
    explicit_opts.explicit_beta = true;
    for (int64_t r = 0; r < reps; ++r) {
        RngStream s1(5, uint64_t(r));
        fast[size_t(r)] = double(simulate_recursion(p, s1, {}).x);
        RngStream s2(6, uint64_t(r));
        slow[size_t(r)] = double(simulate_recursion(p, s2, explicit_opts).x);
    }
    std::sort(fast.begin(), fast.end());
    std::sort(slow.begin(), slow.end());
    CHECK(two_sample_ks(fast, slow) < 1.95 * std::sqrt(2.0 / double(reps)));
}

TEST_CASE("recursion and graph pipelines agree in distribution") {
    const int64_t reps = 100000;
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, 100, 8);
    std::vector<double> via_recursion(size_t(reps), 0.0);
    std::vector<double> via_graph(size_t(reps), 0.0);
    for (int64_t r = 0; r < reps; ++r) {
        RngStream s1(8, uint64_t(r));
        via_recursion[size_t(r)] = double(simulate_recursion(p, s1, {}).x);
        RngStream s2(9, uint64_t(r));
        via_graph[size_t(r)] = double(count_descendants(gen_polya(p, s2).first));
    }
    std::sort(via_recursion.begin(), via_recursion.end());
    std::sort(via_graph.begin(), via_graph.end());
    CHECK(two_sample_ks(via_recursion, via_graph) < 0.01);
}

TEST_CASE("martingale residual vanishes under the power scaling") {
    // L0 = X - 1 - P0 concentrates: the scaled spread must shrink with n
    const DerivedConstants c = derive_constants(2, 0.0);
    std::vector<double> spread;
    for (const int64_t n : {10000LL, 100000LL, 1000000LL}) {
        const int64_t reps = 150;
        std::vector<double> l0(size_t(reps), 0.0);
        const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, n, 13);
        TraceOptions opts;
        opts.explicit_beta = true;
        parallel_for(reps, 0, [&](int64_t r) {
            RngStream s(13, uint64_t(n) * 1000 + uint64_t(r));
            const DescendantTrace t = simulate_recursion(p, s, opts);
            l0[size_t(r)] = (double(t.x) - 1.0 - t.p0) / std::pow(double(n), c.nu);
        });
        const SummaryStats st = summarize(l0);
        CHECK(std::fabs(st.mean) < 0.1);
        spread.push_back(std::sqrt(st.variance));
    }
    CHECK(spread[1] < spread[0]);
    CHECK(spread[2] < spread[1]);
}

TEST_CASE("hit probabilities decay along a dyadic level grid") {
    const int64_t n = 1000;
    const int64_t reps = 20000;
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, n, 14);
    TraceOptions opts;
    opts.depth = TraceOptions::Depth::full;
    const std::vector<int64_t> grid = {16, 32, 64, 128, 256, 512};
    std::vector<double> hits(grid.size(), 0.0);
    for (int64_t r = 0; r < reps; ++r) {
        RngStream s(14, uint64_t(r));
        const DescendantTrace t = simulate_recursion(p, s, opts);
        for (size_t gi = 0; gi < grid.size(); ++gi)
            hits[gi] += t.J[size_t(grid[gi])];
    }
    const DerivedConstants c = derive_constants(2, 0.0);
    double reported_constant = 0.0;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        hits[gi] /= double(reps);
        const double shape = std::pow(double(n), c.kappa) /
                             std::pow(double(grid[gi]), 1.0 + c.kappa);
        reported_constant = std::max(reported_constant, hits[gi] / shape);
        if (gi > 0) {
            const double se = std::sqrt(hits[gi - 1] / double(reps)) +
                              std::sqrt(hits[gi] / double(reps));
            CHECK(hits[gi] < hits[gi - 1] + 3.0 * se);
        }
    }
    CHECK(std::isfinite(reported_constant));
    CHECK(reported_constant > 0.0);
    MESSAGE("observed hit-shape constant: ", reported_constant);
}

TEST_CASE("scaled curve extraction") {
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, 20000, 15);
    TraceOptions opts;
    opts.depth = TraceOptions::Depth::full;
    RngStream s(15, 0);
    const DescendantTrace t = simulate_recursion(p, s, opts);
    const DerivedConstants c = derive_constants(2, 0.0);
    const double n_nu = std::pow(20000.0, c.nu);

    const std::vector<double> grid = {0.5, 1.0, 2.0, 1e9};
    const CurveTable table = extract_scaled_curves(t, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(table.Y[i] >= 0.0);
        CHECK(table.W[i] >= 0.0);
        CHECK(table.A[i] >= 0.0);
        CHECK(table.P[i] >= 0.0);
    }
    // beyond the last level the curves freeze at their terminal values
    CHECK(table.Y.back() ==
          doctest::Approx(double(t.Y[size_t(t.n - 1)]) / n_nu).epsilon(1e-12));
    CHECK(table.A.back() == 0.0);

    // the stored tail statistic is the W curve read off at the cut level
    const std::vector<double> cut = {double(t.n1) / n_nu};
    const CurveTable at_cut = extract_scaled_curves(t, cut);
    CHECK(at_cut.W[0] == doctest::Approx(t.xi).epsilon(1e-9));

    CHECK_THROWS(extract_scaled_curves(t, {0.0}));
    DescendantTrace bare;
    CHECK_THROWS(extract_scaled_curves(bare, {1.0}));
}

TEST_CASE("curve means approach the limit curve") {
    const int64_t n = 100000;
    const int64_t reps = 400;
    const DerivedConstants c = derive_constants(2, 0.0);
    const double n_nu = std::pow(double(n), c.nu);
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, n, 16);
    TraceOptions opts;
    opts.probe_positions = {1.0 * n_nu};
    std::vector<double> vals(size_t(reps), 0.0);
    parallel_for(reps, 0, [&](int64_t r) {
        RngStream s(16, uint64_t(r));
        vals[size_t(r)] = simulate_recursion(p, s, opts).y_probes[0] / n_nu;
    });
    const SummaryStats st = summarize(vals);
    const double ref = mean_curve_Y(1.0, 2, 0.0);
    CHECK(std::fabs(st.mean - ref) < 0.05 * ref + 3.0 * st.std_error);
}

TEST_CASE("trace csv dump") {
    const ModelParams p = params_of(Variant::polya_urn, 2, 0.0, 50, 17);
    TraceOptions opts;
    opts.depth = TraceOptions::Depth::full;
    RngStream s(17, 0);
    const DescendantTrace t = simulate_recursion(p, s, opts);
    std::ostringstream out;
    write_trace_csv(t, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,Y,Z,J,Phi,W,A,M,P");
    int64_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 50);

    DescendantTrace bare;
    std::ostringstream dummy;
    CHECK_THROWS(write_trace_csv(bare, dummy));
}
