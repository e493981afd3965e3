#include "desclab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "desclab/enumeration.hpp"
#include "desclab/generators.hpp"
#include "desclab/special.hpp"
#include "desclab/stats.hpp"
#include "desclab/theory.hpp"
#include "desclab/yule.hpp"

namespace desclab {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t)>& body) {
    threads = std::min<int64_t>(resolve_threads(threads), count);
    if (threads <= 1) {
        for (int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(size_t(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

ExperimentConfig config_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    ExperimentConfig config;
    if (doc.contains("variant"))
        config.params.variant = variant_from_name(doc.at("variant").get<std::string>());
    if (doc.contains("m")) config.params.m = doc.at("m").get<int>();
    if (doc.contains("rho")) config.params.rho = doc.at("rho").get<double>();
    if (doc.contains("n")) config.params.n = doc.at("n").get<int64_t>();
    if (doc.contains("master_seed"))
        config.params.master_seed = doc.at("master_seed").get<uint64_t>();
    if (doc.contains("seed"))
        config.params.master_seed = doc.at("seed").get<uint64_t>();
    if (doc.contains("replicates"))
        config.replicates = doc.at("replicates").get<int64_t>();
    if (doc.contains("pipeline")) {
        const auto p = doc.at("pipeline").get<std::string>();
        if (p == "bfs" || p == "graph-bfs")
            config.pipeline = ExperimentConfig::Pipeline::graph_bfs;
        else if (p == "recursion")
            config.pipeline = ExperimentConfig::Pipeline::recursion;
        else
            throw std::invalid_argument("config: unknown pipeline " + p);
    }
    if (doc.contains("record_xi")) config.record_xi = doc.at("record_xi").get<bool>();
    if (doc.contains("t_grid"))
        config.t_grid = doc.at("t_grid").get<std::vector<double>>();
    if (doc.contains("moments_p"))
        config.moments_p = doc.at("moments_p").get<std::vector<double>>();
    if (doc.contains("checks"))
        config.checks = doc.at("checks").get<std::vector<std::string>>();
    if (doc.contains("scale")) config.scale = doc.at("scale").get<double>();
    if (doc.contains("beta_tilde_K"))
        config.beta_tilde_K = doc.at("beta_tilde_K").get<int64_t>();
    if (doc.contains("product_samples"))
        config.product_samples = doc.at("product_samples").get<int64_t>();
    if (doc.contains("xi_replicates"))
        config.xi_replicates = doc.at("xi_replicates").get<int64_t>();
    if (doc.contains("threads")) config.threads = doc.at("threads").get<int>();
    if (doc.contains("out")) config.out_path = doc.at("out").get<std::string>();
    if (doc.contains("format"))
        config.format = format_from_name(doc.at("format").get<std::string>());
    return config;
}

namespace {

DerivedConstants constants_for(const ModelParams& params) {
    return params.variant == Variant::uniform ? uniform_constants(params.m)
                                              : derive_constants(params.m, params.rho);
}

int64_t graph_descendants(const ModelParams& params, RngStream& stream) {
    switch (params.variant) {
        case Variant::sequential:
            return count_descendants(gen_sequential(params, stream));
        case Variant::polya_urn:
            return count_descendants(gen_polya(params, stream).first);
        case Variant::self_loop:
            return count_descendants(gen_selfloop(params, stream).first);
        case Variant::uniform:
            return count_descendants(gen_uniform(params.m, params.n, stream));
    }
    return 0;
}

std::string fmt_short(double v) {
    char buf[48];
    snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

ResultRow make_row(const ExperimentConfig& config, std::string name,
                   int64_t replicates) {
    ResultRow row;
    row.name = std::move(name);
    row.variant = variant_name(config.params.variant);
    row.m = config.params.m;
    row.rho = config.params.rho;
    row.n = config.params.n;
    row.replicates = replicates;
    row.estimate = std::numeric_limits<double>::quiet_NaN();
    row.std_error = std::numeric_limits<double>::quiet_NaN();
    row.reference = std::numeric_limits<double>::quiet_NaN();
    row.tolerance = 0.0;
    return row;
}

} // namespace

DistributionSamples collect_distribution_samples(const ExperimentConfig& config,
                                                 uint64_t block, uint64_t point) {
    config.params.validate();
    if (config.params.m < 2)
        throw std::invalid_argument("distribution experiment: need m >= 2");
    const int64_t reps = config.replicates;
    if (reps < 1) throw std::invalid_argument("need replicates >= 1");
    for (const double t : config.t_grid)
        if (!(t > 0.0))
            throw std::invalid_argument("config: t_grid entries must be > 0");
    const DerivedConstants c = constants_for(config.params);
    const double n_nu = std::pow(double(config.params.n), c.nu);

    DistributionSamples out;
    out.x_scaled.assign(size_t(reps), 0.0);
    if (config.record_xi) {
        out.xi.assign(size_t(reps), 0.0);
        out.y_n1.assign(size_t(reps), 0);
    }
    out.y_probes.assign(config.t_grid.size(), std::vector<double>());
    for (auto& v : out.y_probes) v.assign(size_t(reps), 0.0);

    TraceOptions opts;
    opts.depth = config.record_xi ? TraceOptions::Depth::xi
                                  : TraceOptions::Depth::x_only;
    for (const double t : config.t_grid)
        opts.probe_positions.push_back(t * n_nu);

    const bool recursion =
        config.pipeline == ExperimentConfig::Pipeline::recursion;
    if (recursion && config.params.variant != Variant::polya_urn &&
        config.params.variant != Variant::uniform)
        throw std::invalid_argument(
            "recursion pipeline supports the polya-urn and uniform variants");

    parallel_for(reps, config.threads, [&](int64_t r) {
        RngStream stream(config.params.master_seed,
                         stream_id_for(block, point, uint64_t(r)));
        if (recursion) {
            const DescendantTrace trace =
                simulate_recursion(config.params, stream, opts);
            out.x_scaled[size_t(r)] = double(trace.x) / n_nu;
            if (config.record_xi) {
                out.xi[size_t(r)] = trace.xi;
                out.y_n1[size_t(r)] = trace.y_n1;
            }
            for (size_t ti = 0; ti < config.t_grid.size(); ++ti)
                out.y_probes[ti][size_t(r)] = trace.y_probes[ti] / n_nu;
        } else {
            const int64_t x = graph_descendants(config.params, stream);
            out.x_scaled[size_t(r)] = double(x) / n_nu;
        }
    });
    return out;
}

ResultTable run_distribution_experiment(const ExperimentConfig& config) {
    const DistributionSamples samples =
        collect_distribution_samples(config, stream_block::experiment, 0);
    const LimitLaw law = limit_law(config.params.m, config.params.rho);
    const bool headline = config.params.m == 2 && config.params.rho == 0.0;

    ResultTable table;
    const SummaryStats stats = summarize(samples.x_scaled);

    ResultRow mean_row = make_row(config, "mean_X_scaled", config.replicates);
    mean_row.estimate = stats.mean;
    mean_row.std_error = stats.std_error;
    mean_row.reference = limit_moment(law, 1.0);
    mean_row.provenance = headline ? "Eq. (1.10)" : "Eq. (1.5)";
    table.rows.push_back(mean_row);

    ResultRow var_row = make_row(config, "var_X_scaled", config.replicates);
    var_row.estimate = stats.variance;
    var_row.std_error = std::numeric_limits<double>::quiet_NaN();
    var_row.reference =
        limit_moment(law, 2.0) - limit_moment(law, 1.0) * limit_moment(law, 1.0);
    var_row.provenance = "Eq. (1.5)";
    table.rows.push_back(var_row);

    for (const double p : config.moments_p) {
        ResultRow row =
            make_row(config, "moment_p" + fmt_short(p) + "_X_scaled",
                     config.replicates);
        row.estimate = raw_moment(samples.x_scaled, p);
        row.reference = limit_moment(law, p);
        row.provenance = "Eq. (1.5)";
        table.rows.push_back(row);
    }

    RngStream ref_stream(config.params.master_seed,
                         stream_id_for(stream_block::reference, 0, 0));
    const int64_t ref_count = 1000000;
    const std::vector<double> reference =
        limit_reference_samples(law, ref_count, ref_stream);
    for (const double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        ResultRow row =
            make_row(config, "quantile_q" + fmt_short(q), config.replicates);
        row.estimate = quantile(samples.x_scaled, q);
        row.reference = reference[size_t(q * double(ref_count - 1))];
        row.provenance = "Eq. (1.4)";
        table.rows.push_back(row);
    }

    {
        std::vector<double> sorted = samples.x_scaled;
        std::sort(sorted.begin(), sorted.end());
        ResultRow row = make_row(config, "ks_vs_limit", config.replicates);
        row.estimate = two_sample_ks(sorted, reference);
        row.provenance = "Eq. (1.4)";
        table.rows.push_back(row);
    }

    for (size_t ti = 0; ti < config.t_grid.size(); ++ti) {
        const double t = config.t_grid[ti];
        ResultRow row = make_row(config, "y_curve_t" + fmt_short(t),
                                 config.replicates);
        const SummaryStats cs = summarize(samples.y_probes[ti]);
        row.estimate = cs.mean;
        row.std_error = cs.std_error;
        row.reference = mean_curve_Y(t, config.params.m, config.params.rho);
        row.provenance = "Eq. (9.26)";
        table.rows.push_back(row);
    }
    return table;
}

double beta_tilde_sample(int m, double rho, int64_t K, RngStream& stream) {
    if (K < 100) throw std::invalid_argument("beta_tilde_sample: need K >= 100");
    const DerivedConstants c = derive_constants(m, rho);
    double log_phi = std::log(double(m));
    for (int64_t j = 2; j <= K; ++j) {
        const double b =
            sample_beta(stream, m + rho, (2.0 * j - 3.0) * m + (j - 1.0) * rho);
        log_phi += std::log1p(double(m - 1) * b);
    }
    return std::exp(log_phi - c.kappa * std::log(double(K)));
}

// ---------------------------------------------------------------------------
// theory battery

namespace {

struct BatteryContext {
    const ExperimentConfig& config;
    std::vector<ResultRow> rows;

    int64_t scaled(int64_t reps) const {
        return std::max<int64_t>(int64_t(double(reps) * config.scale), 32);
    }
    uint64_t seed() const { return config.params.master_seed; }
    int threads() const { return config.threads; }
};

void check_exact_s(BatteryContext& ctx) {
    struct Point { int64_t n, k; int m; double rho; };
    const Point points[] = {{1000, 100, 2, 0.0}, {1000, 250, 3, 1.0},
                            {200, 50, 2, -0.5}};
    const uint64_t block = stream_block::battery_base + 0;
    for (size_t pi = 0; pi < 3; ++pi) {
        const auto [n, k, m, rho] = points[pi];
        const int64_t reps = ctx.scaled(20000);
        std::vector<double> values(static_cast<size_t>(reps), 0.0);
        parallel_for(reps, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(block, pi, uint64_t(r)));
            double s = 1.0;
            for (int64_t j = k + 1; j <= n - 1; ++j)
                s *= 1.0 - sample_beta(stream, m + rho,
                                       (2.0 * j - 3.0) * m + (j - 1.0) * rho);
            values[size_t(r)] = s;
        });
        const SummaryStats st = summarize(values);
        ResultRow row;
        row.name = "exact_S_mc_n" + std::to_string(n) + "_k" + std::to_string(k) +
                   "_m" + std::to_string(m) + "_rho" + fmt_short(rho);
        row.variant = "polya";
        row.m = m;
        row.rho = rho;
        row.n = n;
        row.replicates = reps;
        row.estimate = st.mean;
        row.std_error = st.std_error;
        row.reference = expected_S(n, k, m, rho);
        row.provenance = "Eq. (3.12)";
        row.tolerance = 4.0 * st.std_error;
        row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
        ctx.rows.push_back(row);
    }
}

void check_exact_phi(BatteryContext& ctx) {
    struct Point { int64_t k; int m; double rho; };
    const Point points[] = {{1000, 2, 0.0}, {1000, 3, 1.0}, {300, 2, -0.5}};
    const uint64_t block = stream_block::battery_base + 1;
    for (size_t pi = 0; pi < 3; ++pi) {
        const auto [k, m, rho] = points[pi];
        const int64_t reps = ctx.scaled(20000);
        std::vector<double> values(static_cast<size_t>(reps), 0.0);
        parallel_for(reps, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(block, pi, uint64_t(r)));
            double log_phi = std::log(double(m));
            for (int64_t j = 2; j <= k; ++j) {
                const double b = sample_beta(
                    stream, m + rho, (2.0 * j - 3.0) * m + (j - 1.0) * rho);
                log_phi += std::log1p(double(m - 1) * b);
            }
            values[size_t(r)] = std::exp(log_phi);
        });
        const SummaryStats st = summarize(values);
        ResultRow row;
        row.name = "exact_phi_mc_k" + std::to_string(k) + "_m" +
                   std::to_string(m) + "_rho" + fmt_short(rho);
        row.variant = "polya";
        row.m = m;
        row.rho = rho;
        row.n = k;
        row.replicates = reps;
        row.estimate = st.mean;
        row.std_error = st.std_error;
        row.reference = expected_phi(k, m, rho);
        row.provenance = "Eq. (3.7)";
        row.tolerance = 4.0 * st.std_error;
        row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
        ctx.rows.push_back(row);
    }

    // deterministic asymptotic-constant reproduction at k = 1e6
    ResultRow row;
    row.name = "phi_growth_constant_m2_rho0";
    row.variant = "polya";
    row.m = 2;
    row.rho = 0.0;
    row.n = 1000000;
    row.replicates = 0;
    row.estimate = expected_phi(1000000, 2, 0.0) / std::sqrt(1e6);
    row.std_error = std::numeric_limits<double>::quiet_NaN();
    row.reference = 4.0 / std::sqrt(3.14159265358979323846);
    row.provenance = "Eq. (3.7)";
    row.tolerance = 1e-3 * row.reference;
    row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
    ctx.rows.push_back(row);
}

void check_beta_moments(BatteryContext& ctx) {
    struct Point { int64_t i; int m; double rho; };
    const Point points[] = {{10, 2, 0.0}, {5, 3, 1.0}, {2, 2, -0.5}};
    const uint64_t block = stream_block::battery_base + 2;
    for (size_t pi = 0; pi < 3; ++pi) {
        const auto [i, m, rho] = points[pi];
        const int64_t reps = ctx.scaled(1000000);
        std::vector<double> mean_parts(static_cast<size_t>(reps), 0.0);
        std::vector<double> sq_parts(static_cast<size_t>(reps), 0.0);
        parallel_for(reps, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(block, pi, uint64_t(r)));
            const double b = sample_beta(stream, m + rho,
                                         (2.0 * i - 3.0) * m + (i - 1.0) * rho);
            mean_parts[size_t(r)] = b;
            sq_parts[size_t(r)] = b * b;
        });
        const auto [ref_mean, ref_sq] = expected_beta_moments(i, m, rho);
        const SummaryStats st1 = summarize(mean_parts);
        const SummaryStats st2 = summarize(sq_parts);
        const std::string tag = "_i" + std::to_string(i) + "_m" +
                                std::to_string(m) + "_rho" + fmt_short(rho);
        ResultRow row1;
        row1.name = "beta_mean_mc" + tag;
        row1.variant = "polya";
        row1.m = m;
        row1.rho = rho;
        row1.n = i;
        row1.replicates = reps;
        row1.estimate = st1.mean;
        row1.std_error = st1.std_error;
        row1.reference = ref_mean;
        row1.provenance = "Eq. (3.4)";
        row1.tolerance = 4.0 * st1.std_error;
        row1.pass = std::fabs(row1.estimate - row1.reference) <= row1.tolerance;
        ctx.rows.push_back(row1);
        ResultRow row2 = row1;
        row2.name = "beta_second_moment_mc" + tag;
        row2.estimate = st2.mean;
        row2.std_error = st2.std_error;
        row2.reference = ref_sq;
        row2.provenance = "Eq. (3.5)";
        row2.tolerance = 4.0 * st2.std_error;
        row2.pass = std::fabs(row2.estimate - row2.reference) <= row2.tolerance;
        ctx.rows.push_back(row2);
    }
}

void check_s_concentration(BatteryContext& ctx) {
    const int64_t n = 10000;
    const int m = 2;
    const double rho = 0.0;
    const double chi = derive_constants(m, rho).chi;
    const double psi = double(n) / std::log(double(n));
    const double delta = std::pow(psi, -1.0 / 3.0);
    const int64_t k_min = int64_t(std::ceil(psi));
    const int64_t reps = ctx.scaled(200);
    const uint64_t block = stream_block::battery_base + 3;
    std::vector<double> exceed(static_cast<size_t>(reps), 0.0);
    parallel_for(reps, ctx.threads(), [&](int64_t r) {
        RngStream stream(ctx.seed(), stream_id_for(block, 0, uint64_t(r)));
        const auto betas = sample_beta_sequence(n, m, rho, stream);
        const auto S = s_products(betas);
        double max_dev = 0.0;
        for (int64_t k = k_min; k < n; ++k)
            max_dev = std::max(
                max_dev, std::fabs(S[size_t(k)] -
                                   std::pow(double(k) / double(n), chi)));
        exceed[size_t(r)] = max_dev >= 2.0 * delta ? 1.0 : 0.0;
    });
    const SummaryStats st = summarize(exceed);
    ResultRow row;
    row.name = "s_concentration_exceed_rate_n" + std::to_string(n);
    row.variant = "polya";
    row.m = m;
    row.rho = rho;
    row.n = n;
    row.replicates = reps;
    row.estimate = st.mean;
    row.std_error = st.std_error;
    row.reference = std::pow(psi, -1.0 / 3.0);  // bound with C = 1
    row.provenance = "Lemma 3.3";
    row.tolerance = row.reference;
    row.pass = row.estimate <= row.reference;
    ctx.rows.push_back(row);
}

void check_lh_sums(BatteryContext& ctx) {
    const int m = ctx.config.params.m;
    const double rho = ctx.config.params.rho;
    const int64_t n = ctx.config.params.n;
    const DerivedConstants c = derive_constants(m, rho);
    const double lambda = std::pow(double(n), c.nu);
    const double s = 0.5, t = 2.0, y = 1.0;
    const int64_t lo = int64_t(s * lambda);
    const int64_t hi = int64_t(t * lambda);
    const int64_t reps = ctx.scaled(2000);
    const uint64_t block = stream_block::battery_base + 4;
    std::vector<double> h_vals(static_cast<size_t>(reps), 0.0);
    std::vector<double> i_vals(static_cast<size_t>(reps), 0.0);
    parallel_for(reps, ctx.threads(), [&](int64_t r) {
        RngStream stream(ctx.seed(), stream_id_for(block, 0, uint64_t(r)));
        double h_sum = 0.0, i_sum = 0.0;
        for (int64_t i = lo + 1; i <= hi; ++i) {
            const double b = sample_beta(stream, m + rho,
                                         (2.0 * i - 3.0) * m + (i - 1.0) * rho);
            const double decay = std::exp(lambda * y * std::log1p(-b));
            h_sum += decay - 1.0 + lambda * y * b;
            i_sum += 1.0 - decay;
        }
        h_vals[size_t(r)] = h_sum / lambda;
        i_vals[size_t(r)] = i_sum / lambda;
    });
    const auto [h_ref, i_ref] = lh_integrals(s, t, y, m, rho);
    const SummaryStats hs = summarize(h_vals);
    const SummaryStats is = summarize(i_vals);
    ResultRow row;
    row.variant = "polya";
    row.m = m;
    row.rho = rho;
    row.n = n;
    row.replicates = reps;
    row.name = "lh_sum_H_s0.5_t2_y1";
    row.estimate = hs.mean;
    row.std_error = hs.std_error;
    row.reference = h_ref;
    row.provenance = "Eq. (3.16)";
    row.tolerance = 4.0 * hs.std_error + 3.0 / lambda * std::fabs(h_ref) + 0.01;
    row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
    ctx.rows.push_back(row);
    ResultRow row2 = row;
    row2.name = "lh_sum_I_s0.5_t2_y1";
    row2.estimate = is.mean;
    row2.std_error = is.std_error;
    row2.reference = i_ref;
    row2.provenance = "Eq. (3.17)";
    row2.tolerance = 4.0 * is.std_error + 3.0 / lambda * std::fabs(i_ref) + 0.01;
    row2.pass = std::fabs(row2.estimate - row2.reference) <= row2.tolerance;
    ctx.rows.push_back(row2);
}

void check_pa_pu(BatteryContext& ctx) {
    const int64_t n = 4;
    const int m = 2;
    const double rho = 0.0;
    const int64_t reps = ctx.scaled(1000000);
    const auto exact = enumerate_sequential_exact(n, m, rho);
    std::vector<double> expected(exact.size());
    for (size_t i = 0; i < exact.size(); ++i) expected[i] = exact[i] * double(reps);

    for (int which = 0; which < 2; ++which) {
        const uint64_t block = stream_block::battery_base + 5 + uint64_t(which);
        const int chunks = 64;
        const int64_t per_chunk = (reps + chunks - 1) / chunks;
        std::vector<std::vector<int64_t>> counts(
            size_t(chunks), std::vector<int64_t>(exact.size(), 0));
        parallel_for(chunks, ctx.threads(), [&](int64_t chunk) {
            const int64_t begin = chunk * per_chunk;
            const int64_t end = std::min(reps, begin + per_chunk);
            auto& local = counts[size_t(chunk)];
            for (int64_t r = begin; r < end; ++r) {
                RngStream stream(ctx.seed(),
                                 stream_id_for(block, 0, uint64_t(r)));
                ModelParams params;
                params.m = m;
                params.rho = rho;
                params.n = n;
                params.master_seed = ctx.seed();
                int64_t idx;
                if (which == 0) {
                    params.variant = Variant::sequential;
                    idx = tuple_index(gen_sequential(params, stream));
                } else {
                    params.variant = Variant::polya_urn;
                    idx = tuple_index(gen_polya(params, stream).first);
                }
                ++local[size_t(idx)];
            }
        });
        std::vector<int64_t> observed(exact.size(), 0);
        for (const auto& local : counts)
            for (size_t i = 0; i < observed.size(); ++i) observed[i] += local[i];
        const ChiSquareResult chi = chi_square(observed, expected);
        ResultRow row;
        row.name = which == 0 ? "pa_pu_chisq_sequential" : "pa_pu_chisq_polya";
        row.variant = which == 0 ? "sequential" : "polya";
        row.m = m;
        row.rho = rho;
        row.n = n;
        row.replicates = reps;
        row.estimate = chi.p_value;
        row.std_error = std::numeric_limits<double>::quiet_NaN();
        row.reference = std::numeric_limits<double>::quiet_NaN();
        row.provenance = "Theorem 2.3";
        row.tolerance = 1e-3;  // minimum acceptable p-value
        row.pass = chi.p_value > 1e-3;
        ctx.rows.push_back(row);
    }
}

// recursion runs recording Xi and Y_{n1}; products beta~ * xi as the limit
// reference; the Yule count at the matching clock position for the coupling
void check_xi_limit(BatteryContext& ctx) {
    const int m = ctx.config.params.m;
    const double rho = ctx.config.params.rho;
    const int64_t n = ctx.config.params.n;
    const DerivedConstants c = derive_constants(m, rho);

    ExperimentConfig sub = ctx.config;
    sub.params.variant = Variant::polya_urn;
    sub.replicates = std::max<int64_t>(
        int64_t(double(ctx.config.xi_replicates) * ctx.config.scale), 32);
    sub.record_xi = true;
    sub.t_grid.clear();
    const DistributionSamples samples =
        collect_distribution_samples(sub, stream_block::battery_base + 7, 0);

    const int64_t products =
        std::max<int64_t>(int64_t(double(ctx.config.product_samples) *
                                  ctx.config.scale), 32);
    std::vector<double> product_vals(static_cast<size_t>(products), 0.0);
    const uint64_t pblock = stream_block::battery_base + 8;
    parallel_for(products, ctx.threads(), [&](int64_t r) {
        RngStream stream(ctx.seed(), stream_id_for(pblock, 0, uint64_t(r)));
        const double bt =
            beta_tilde_sample(m, rho, ctx.config.beta_tilde_K, stream);
        const double xi =
            sample_gamma(stream, double(m) / (m - 1), double(m - 1));
        product_vals[size_t(r)] = bt * xi;
    });

    std::vector<double> xi_sorted = samples.xi;
    std::sort(xi_sorted.begin(), xi_sorted.end());
    std::vector<double> product_sorted = product_vals;
    std::sort(product_sorted.begin(), product_sorted.end());

    ResultRow row;
    row.name = "xi_ks_n" + std::to_string(n);
    row.variant = "polya";
    row.m = m;
    row.rho = rho;
    row.n = n;
    row.replicates = sub.replicates;
    row.estimate = two_sample_ks(xi_sorted, product_sorted);
    row.std_error = std::numeric_limits<double>::quiet_NaN();
    row.reference = std::numeric_limits<double>::quiet_NaN();
    row.provenance = "Lemma 6.3";
    row.tolerance = 0.08;
    row.pass = row.estimate < row.tolerance;
    ctx.rows.push_back(row);

    // beta~ mean against the growth constant of the normalizing product
    {
        const int64_t bt_samples = std::max<int64_t>(
            int64_t(2000.0 * ctx.config.scale), 32);
        std::vector<double> bt_vals(static_cast<size_t>(bt_samples), 0.0);
        const uint64_t bblock = stream_block::battery_base + 9;
        const int64_t K = std::min<int64_t>(ctx.config.beta_tilde_K, 10000);
        parallel_for(bt_samples, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(bblock, 0, uint64_t(r)));
            bt_vals[size_t(r)] = beta_tilde_sample(m, rho, K, stream);
        });
        const SummaryStats st = summarize(bt_vals);
        ResultRow brow;
        brow.name = "beta_tilde_mean_K" + std::to_string(K);
        brow.variant = "polya";
        brow.m = m;
        brow.rho = rho;
        brow.n = K;
        brow.replicates = bt_samples;
        brow.estimate = st.mean;
        brow.std_error = st.std_error;
        brow.reference = phi_growth_constant(m, rho);
        brow.provenance = "Lemma 3.2";
        brow.tolerance = 4.0 * st.std_error;
        brow.pass = std::fabs(brow.estimate - brow.reference) <= brow.tolerance;
        ctx.rows.push_back(brow);
    }

    // coupling: Y at level n1 against the time-changed branching count
    {
        const int64_t n1 = std::min<int64_t>(
            std::max<int64_t>(int64_t(double(n) / std::log(double(n))), 1),
            n - 1);
        const double x = std::pow(double(n1) / double(n), c.chi);
        const int64_t runs = sub.replicates;
        std::vector<double> yule_counts(static_cast<size_t>(runs), 0.0);
        const uint64_t yblock = stream_block::battery_base + 10;
        parallel_for(runs, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(yblock, 0, uint64_t(r)));
            yule_counts[size_t(r)] = double(yule_at(m, x, stream).count);
        });
        std::vector<double> y_sorted(samples.y_n1.size());
        for (size_t i = 0; i < samples.y_n1.size(); ++i)
            y_sorted[i] = double(samples.y_n1[i]);
        std::sort(y_sorted.begin(), y_sorted.end());
        std::sort(yule_counts.begin(), yule_counts.end());
        ResultRow crow;
        crow.name = "coupling_ks_n" + std::to_string(n);
        crow.variant = "polya";
        crow.m = m;
        crow.rho = rho;
        crow.n = n;
        crow.replicates = runs;
        crow.estimate = two_sample_ks(y_sorted, yule_counts);
        crow.std_error = std::numeric_limits<double>::quiet_NaN();
        crow.reference = std::numeric_limits<double>::quiet_NaN();
        crow.provenance = "Eq. (6.9)";
        crow.tolerance = 0.05;
        crow.pass = crow.estimate < crow.tolerance;
        ctx.rows.push_back(crow);
    }
}

void check_yule(BatteryContext& ctx) {
    struct Point { int m; double x; };
    const Point points[] = {{2, 0.1}, {3, 0.2}};
    const uint64_t block = stream_block::battery_base + 11;
    for (size_t pi = 0; pi < 2; ++pi) {
        const auto [m, x] = points[pi];
        const int64_t runs = ctx.scaled(100000);
        std::vector<double> counts(static_cast<size_t>(runs), 0.0);
        parallel_for(runs, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(block, pi, uint64_t(r)));
            counts[size_t(r)] = double(yule_at(m, x, stream).count);
        });
        const SummaryStats st = summarize(counts);
        ResultRow row;
        row.name = "yule_mean_m" + std::to_string(m) + "_x" + fmt_short(x);
        row.variant = "";
        row.m = m;
        row.rho = 0.0;
        row.n = 0;
        row.replicates = runs;
        row.estimate = st.mean;
        row.std_error = st.std_error;
        row.reference = double(m) / std::pow(x, double(m - 1));
        row.provenance = "Eq. (9.8)";
        row.tolerance = 3.0 * st.std_error;
        row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
        ctx.rows.push_back(row);
    }

    // distributional limit of the scaled count at small clock positions
    {
        const int m = 2;
        const double x = 1e-3;
        const int64_t runs = ctx.scaled(10000);
        std::vector<double> scaled(static_cast<size_t>(runs), 0.0);
        const uint64_t kblock = stream_block::battery_base + 12;
        parallel_for(runs, ctx.threads(), [&](int64_t r) {
            RngStream stream(ctx.seed(), stream_id_for(kblock, 0, uint64_t(r)));
            scaled[size_t(r)] = yule_at(m, x, stream).scaled;
        });
        const int64_t refs = ctx.scaled(100000);
        std::vector<double> gamma_ref(static_cast<size_t>(refs), 0.0);
        RngStream gstream(ctx.seed(), stream_id_for(kblock, 1, 0));
        for (auto& v : gamma_ref)
            v = sample_gamma(gstream, double(m) / (m - 1), double(m - 1));
        std::sort(scaled.begin(), scaled.end());
        std::sort(gamma_ref.begin(), gamma_ref.end());
        ResultRow row;
        row.name = "yule_scaled_ks_m2_x0.001";
        row.variant = "";
        row.m = m;
        row.rho = 0.0;
        row.n = 0;
        row.replicates = runs;
        row.estimate = two_sample_ks(scaled, gamma_ref);
        row.std_error = std::numeric_limits<double>::quiet_NaN();
        row.reference = std::numeric_limits<double>::quiet_NaN();
        row.provenance = "Eq. (9.10)";
        row.tolerance = 0.03;
        row.pass = row.estimate < row.tolerance;
        ctx.rows.push_back(row);
    }
}

void check_selfloop(BatteryContext& ctx) {
    const int m = 2;
    const double rho = 0.0;
    const int64_t n = ctx.config.params.n;
    const DerivedConstants c = derive_constants(m, rho);
    const double n_nu = std::pow(double(n), c.nu);
    const int64_t reps = ctx.scaled(1000);

    std::vector<double> loop_scaled(static_cast<size_t>(reps), 0.0);
    const uint64_t block = stream_block::battery_base + 13;
    parallel_for(reps, ctx.threads(), [&](int64_t r) {
        RngStream stream(ctx.seed(), stream_id_for(block, 0, uint64_t(r)));
        ModelParams params;
        params.variant = Variant::self_loop;
        params.m = m;
        params.rho = rho;
        params.n = n;
        params.master_seed = ctx.seed();
        loop_scaled[size_t(r)] =
            double(count_descendants(gen_selfloop(params, stream).first)) / n_nu;
    });

    std::vector<double> std_scaled(static_cast<size_t>(reps), 0.0);
    const uint64_t sblock = stream_block::battery_base + 14;
    parallel_for(reps, ctx.threads(), [&](int64_t r) {
        RngStream stream(ctx.seed(), stream_id_for(sblock, 0, uint64_t(r)));
        ModelParams params;
        params.variant = Variant::polya_urn;
        params.m = m;
        params.rho = rho;
        params.n = n;
        params.master_seed = ctx.seed();
        std_scaled[size_t(r)] =
            double(simulate_recursion(params, stream, {}).x) / n_nu;
    });

    const LimitLaw law = limit_law(m, rho);
    const SummaryStats st = summarize(loop_scaled);
    ResultRow row;
    row.name = "selfloop_mean_X_scaled_n" + std::to_string(n);
    row.variant = "selfloop";
    row.m = m;
    row.rho = rho;
    row.n = n;
    row.replicates = reps;
    row.estimate = st.mean;
    row.std_error = st.std_error;
    row.reference = limit_moment(law, 1.0);
    row.provenance = "Theorem 10.2";
    row.tolerance = 0.12 * row.reference;
    row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
    ctx.rows.push_back(row);

    std::sort(loop_scaled.begin(), loop_scaled.end());
    std::sort(std_scaled.begin(), std_scaled.end());
    ResultRow krow;
    krow.name = "selfloop_vs_standard_ks_n" + std::to_string(n);
    krow.variant = "selfloop";
    krow.m = m;
    krow.rho = rho;
    krow.n = n;
    krow.replicates = reps;
    krow.estimate = two_sample_ks(loop_scaled, std_scaled);
    krow.std_error = std::numeric_limits<double>::quiet_NaN();
    krow.reference = std::numeric_limits<double>::quiet_NaN();
    krow.provenance = "Theorem 10.2";
    krow.tolerance = 0.08;
    krow.pass = krow.estimate < krow.tolerance;
    ctx.rows.push_back(krow);
}

void check_m1_drift(BatteryContext& ctx) {
    const double rho = 0.0;
    const int64_t n = ctx.config.params.n;
    const int64_t reps = ctx.scaled(1000);
    std::vector<double> values(static_cast<size_t>(reps), 0.0);
    const uint64_t block = stream_block::battery_base + 15;
    parallel_for(reps, ctx.threads(), [&](int64_t r) {
        RngStream stream(ctx.seed(), stream_id_for(block, 0, uint64_t(r)));
        ModelParams params;
        params.variant = Variant::sequential;
        params.m = 1;
        params.rho = rho;
        params.n = n;
        params.master_seed = ctx.seed();
        values[size_t(r)] =
            double(count_descendants(gen_sequential(params, stream))) /
            std::log(double(n));
    });
    const SummaryStats st = summarize(values);
    ResultRow row;
    row.name = "m1_drift_n" + std::to_string(n);
    row.variant = "sequential";
    row.m = 1;
    row.rho = rho;
    row.n = n;
    row.replicates = reps;
    row.estimate = st.mean;
    row.std_error = st.std_error;
    row.reference = m1_drift(rho);
    row.provenance = "Eq. (1.11)";
    row.tolerance = 0.10 * row.reference;
    row.pass = std::fabs(row.estimate - row.reference) <= row.tolerance;
    ctx.rows.push_back(row);
}

} // namespace

VerificationReport run_theory_battery(const ExperimentConfig& config) {
    BatteryContext ctx{config, {}};
    const auto selected = [&](const char* name) {
        if (config.checks.empty()) return true;
        for (const auto& c : config.checks)
            if (c == name) return true;
        return false;
    };
    if (selected("a") || selected("exact_S")) check_exact_s(ctx);
    if (selected("b") || selected("exact_phi")) check_exact_phi(ctx);
    if (selected("c") || selected("beta_moments")) check_beta_moments(ctx);
    if (selected("d") || selected("s_concentration")) check_s_concentration(ctx);
    if (selected("e") || selected("lh_sums")) check_lh_sums(ctx);
    if (selected("f") || selected("pa_pu")) check_pa_pu(ctx);
    if (selected("g") || selected("xi_limit")) check_xi_limit(ctx);
    if (selected("h") || selected("yule")) check_yule(ctx);
    if (selected("i") || selected("selfloop")) check_selfloop(ctx);
    if (selected("j") || selected("m1")) check_m1_drift(ctx);

    VerificationReport report;
    report.table.rows = std::move(ctx.rows);
    return report;
}

} // namespace desclab
