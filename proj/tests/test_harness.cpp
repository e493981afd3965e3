#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "desclab/enumeration.hpp"
#include "desclab/harness.hpp"
#include "desclab/stats.hpp"
#include "desclab/theory.hpp"

using namespace desclab;

TEST_CASE("parallel map covers every index exactly once") {
    std::vector<int> hits(10000, 0);
    parallel_for(10000, 4, [&](int64_t i) { ++hits[size_t(i)]; });
    for (const int h : hits) CHECK(h == 1);

    // worker exceptions propagate
    CHECK_THROWS(parallel_for(100, 4, [](int64_t i) {
        if (i == 57) throw std::runtime_error("boom");
    }));
}

TEST_CASE("result tables round trip through csv and json") {
    ResultTable table;
    ResultRow row;
    row.name = "mean_X_scaled";
    row.variant = "polya";
    row.m = 2;
    row.rho = 0.0;
    row.n = 1000;
    row.replicates = 17;
    row.estimate = 2.1941234567890123;
    row.std_error = 0.01;
    row.reference = 2.19416;
    row.provenance = "Eq. (1.10)";
    row.tolerance = 0.1;
    row.pass = 1;
    table.rows.push_back(row);
    ResultRow sparse;
    sparse.name = "ks, with comma";
    sparse.variant = "uniform";
    sparse.m = 3;
    sparse.rho = -0.25;
    sparse.n = 42;
    sparse.replicates = 1;
    sparse.estimate = 0.5;
    sparse.std_error = std::numeric_limits<double>::quiet_NaN();
    sparse.reference = std::numeric_limits<double>::quiet_NaN();
    sparse.provenance = "";
    sparse.tolerance = 0.0;
    sparse.pass = -1;
    table.rows.push_back(sparse);

    const ResultTable from_csv = parse_csv(to_csv(table));
    CHECK(from_csv == table);
    const ResultTable from_json = parse_json(to_json(table));
    CHECK(from_json == table);

    // the two encodings carry identical rows
    CHECK(from_csv == from_json);

    // empty table: header only
    const std::string empty_csv = to_csv(ResultTable{});
    CHECK(empty_csv ==
          "name,variant,m,rho,n,replicates,estimate,stderr,reference,"
          "provenance,pass\n");
    CHECK(parse_csv(empty_csv).rows.empty());

    // undefined stderr serializes as an empty field
    CHECK(to_csv(table).find(",0.5,,,") != std::string::npos);

    // file io round trip
    write_results(table, "harness_roundtrip.json", OutputFormat::json);
    CHECK(read_results("harness_roundtrip.json") == table);
    write_results(table, "harness_roundtrip.csv", OutputFormat::csv);
    CHECK(read_results("harness_roundtrip.csv") == table);
    std::remove("harness_roundtrip.json");
    std::remove("harness_roundtrip.csv");

    CHECK_THROWS(write_results(table, "/nonexistent-dir/x.csv", OutputFormat::csv));
}

TEST_CASE("exact tuple enumeration") {
    const auto probs = enumerate_sequential_exact(4, 2, 0.0);
    REQUIRE(int64_t(probs.size()) == tuple_count(4, 2));
    REQUIRE(probs.size() == 36);
    double total = 0.0;
    for (const double p : probs) {
        CHECK(p > 0.0);
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // hand-computed entry: vertex 3 takes (1,1), then vertex 4 takes (1,1)
    // P = (2/4)(3/5) * (4/8)(5/9)
    const double hand = (2.0 / 4.0) * (3.0 / 5.0) * (4.0 / 8.0) * (5.0 / 9.0);
    CHECK(probs[0] == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("distribution experiment output shape") {
    ExperimentConfig config;
    config.params.variant = Variant::polya_urn;
    config.params.m = 2;
    config.params.rho = 0.0;
    config.params.n = 2000;
    config.params.master_seed = 5;
    config.replicates = 400;
    config.t_grid = {1.0};
    config.threads = 1;
    const ResultTable table = run_distribution_experiment(config);

    bool saw_mean = false, saw_ks = false, saw_curve = false;
    for (const auto& row : table.rows) {
        if (!std::isnan(row.reference)) CHECK(!row.provenance.empty());
        if (row.name == "mean_X_scaled") {
            saw_mean = true;
            CHECK(row.provenance == "Eq. (1.10)");
            CHECK(row.replicates == 400);
            CHECK(row.estimate > 0.0);
        }
        if (row.name == "ks_vs_limit") saw_ks = true;
        if (row.name == "y_curve_t1") {
            saw_curve = true;
            CHECK(row.reference ==
                  doctest::Approx(mean_curve_Y(1.0, 2, 0.0)).epsilon(1e-9));
        }
    }
    CHECK(saw_mean);
    CHECK(saw_ks);
    CHECK(saw_curve);

    // a single replicate leaves the standard error undefined
    config.replicates = 1;
    config.t_grid.clear();
    const ResultTable single = run_distribution_experiment(config);
    CHECK(std::isnan(single.rows[0].std_error));
}

TEST_CASE("distribution experiment is independent of the thread count") {
    ExperimentConfig config;
    config.params.variant = Variant::polya_urn;
    config.params.m = 2;
    config.params.rho = 0.0;
    config.params.n = 3000;
    config.params.master_seed = 99;
    config.replicates = 200;
    config.t_grid = {0.5, 2.0};

    config.threads = 1;
    const std::string serial = to_csv(run_distribution_experiment(config));
    config.threads = 8;
    const std::string threaded = to_csv(run_distribution_experiment(config));
    CHECK(serial == threaded);
}

TEST_CASE("normalizing-product limit samples") {
    RngStream s(1234, 0);
    CHECK_THROWS(beta_tilde_sample(2, 0.0, 50, s));

    const int samples = 2000;
    std::vector<double> vals(size_t(samples), 0.0);
    for (auto& v : vals) {
        v = beta_tilde_sample(2, 0.0, 3000, s);
        REQUIRE(v > 0.0);
    }
    const SummaryStats st = summarize(vals);
    const double ref = phi_growth_constant(2, 0.0);
    CHECK(std::fabs(st.mean - ref) < 4.0 * st.std_error + 1e-3 * ref);

    // truncation stability: doubling the cutoff moves the mean by under 1%
    std::vector<double> coarse(500, 0.0), fine(500, 0.0);
    for (auto& v : coarse) v = beta_tilde_sample(2, 0.0, 10000, s);
    for (auto& v : fine) v = beta_tilde_sample(2, 0.0, 100000, s);
    const SummaryStats cs = summarize(coarse);
    const SummaryStats fs = summarize(fine);
    CHECK(std::fabs(cs.mean - fs.mean) <
          0.01 * fs.mean + 2.0 * (cs.std_error + fs.std_error));
}

TEST_CASE("battery runs selected checks and stays deterministic") {
    ExperimentConfig config;
    config.params.variant = Variant::polya_urn;
    config.params.m = 2;
    config.params.rho = 0.0;
    config.params.n = 20000;
    config.params.master_seed = 7;
    config.scale = 0.02;
    config.xi_replicates = 200;
    config.product_samples = 100;
    config.beta_tilde_K = 2000;
    config.checks = {"a", "c", "f", "h"};
    config.threads = 1;

    const VerificationReport first = run_theory_battery(config);
    CHECK(!first.table.rows.empty());
    for (const auto& row : first.table.rows) {
        CHECK(row.pass >= 0);
        CHECK(!row.provenance.empty());
        CHECK(row.tolerance > 0.0);
    }

    // byte-identical across reruns and thread counts
    const std::string once = to_csv(first.table);
    config.threads = 8;
    const std::string again = to_csv(run_theory_battery(config).table);
    CHECK(once == again);

    // named selection controls which rows appear
    bool has_pa = false;
    for (const auto& row : first.table.rows)
        if (row.name.rfind("pa_pu", 0) == 0) has_pa = true;
    CHECK(has_pa);
    config.checks = {"a"};
    const VerificationReport only_a = run_theory_battery(config);
    for (const auto& row : only_a.table.rows)
        CHECK(row.name.rfind("exact_S", 0) == 0);
}

TEST_CASE("experiment config json") {
    const std::string text = R"({
        "variant": "uniform", "m": 3, "rho": 0.5, "n": 777, "seed": 11,
        "replicates": 55, "pipeline": "bfs", "t_grid": [0.5, 1.0],
        "checks": ["a", "b"], "scale": 0.25, "threads": 2,
        "out": "x.csv", "format": "json"
    })";
    const ExperimentConfig config = config_from_json(text);
    CHECK(config.params.variant == Variant::uniform);
    CHECK(config.params.m == 3);
    CHECK(config.params.rho == 0.5);
    CHECK(config.params.n == 777);
    CHECK(config.params.master_seed == 11);
    CHECK(config.replicates == 55);
    CHECK(config.pipeline == ExperimentConfig::Pipeline::graph_bfs);
    CHECK(config.t_grid == std::vector<double>{0.5, 1.0});
    CHECK(config.checks == std::vector<std::string>{"a", "b"});
    CHECK(config.scale == 0.25);
    CHECK(config.threads == 2);
    CHECK(config.out_path == "x.csv");
    CHECK(config.format == OutputFormat::json);
    CHECK_THROWS(config_from_json("{\"pipeline\": \"bogus\"}"));
}
