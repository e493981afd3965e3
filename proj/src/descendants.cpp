#include "desclab/descendants.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace desclab {

int64_t count_descendants(const Digraph& graph) {
    if (graph.n <= 1) return graph.n;
    std::vector<uint8_t> seen(size_t(graph.n) + 1, 0);
    std::vector<int64_t> stack;
    stack.push_back(graph.n);
    seen[size_t(graph.n)] = 1;
    int64_t count = 0;
    while (!stack.empty()) {
        const int64_t v = stack.back();
        stack.pop_back();
        ++count;
        if (v < 2) continue;
        for (int e = 0; e < graph.m; ++e) {
            const int64_t t = graph.target(v, e);
            if (!seen[size_t(t)]) {
                seen[size_t(t)] = 1;
                stack.push_back(t);
            }
        }
    }
    return count;
}

namespace {

int64_t n1_level(int64_t n) {
    if (n < 3) return std::max<int64_t>(n - 1, 1);
    const auto v = int64_t(double(n) / std::log(double(n)));
    return std::min(std::max<int64_t>(v, 1), n - 1);
}

// (1-B)^Y - 1 + B*Y, stable for tiny B and large Y
double compensator_increment(double b, int64_t y) {
    if (y == 0) return 0.0;
    if (b >= 1.0) return double(y) - 1.0;
    return std::expm1(double(y) * std::log1p(-b)) + b * double(y);
}

double hit_probability(double b, int64_t y) {
    if (y == 0) return 0.0;
    if (b >= 1.0) return 1.0;
    return -std::expm1(double(y) * std::log1p(-b));
}

} // namespace

DescendantTrace simulate_recursion(const ModelParams& params, RngStream& stream,
                                   const TraceOptions& opts) {
    if (params.variant != Variant::polya_urn && params.variant != Variant::uniform)
        throw std::invalid_argument(
            "simulate_recursion: supports the polya-urn and uniform variants");
    params.validate();
    const int64_t n = params.n;
    const int m = params.m;
    const double rho = params.rho;
    const bool uniform = params.variant == Variant::uniform;
    const bool full = opts.depth == TraceOptions::Depth::full;
    const bool want_xi = opts.depth != TraceOptions::Depth::x_only;

    DescendantTrace trace;
    trace.n = n;
    trace.m = m;
    trace.rho = rho;
    trace.uniform = uniform;
    trace.n1 = n1_level(n);
    trace.x = std::min<int64_t>(n, 1);
    if (n <= 1) return trace;
    const bool track_p0 = full || opts.explicit_beta || uniform;

    // probes sorted by descending level to match the sweep direction
    std::vector<std::pair<int64_t, size_t>> probe_levels;
    trace.y_probes.assign(opts.probe_positions.size(), 0.0);
    std::vector<double> probe_floor(opts.probe_positions.size(), 0.0);
    for (size_t i = 0; i < opts.probe_positions.size(); ++i) {
        const double pos =
            std::clamp(opts.probe_positions[i], 0.0, double(n - 1));
        const auto lo = int64_t(std::floor(pos));
        probe_levels.emplace_back(lo, i);
        if (double(lo) != pos) probe_levels.emplace_back(lo + 1, i);
    }
    std::sort(probe_levels.begin(), probe_levels.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    size_t next_probe = 0;

    if (full) {
        trace.Y.assign(size_t(n), 0);
        trace.Z.assign(size_t(n), 0);
        trace.J.assign(size_t(n), 0);
        trace.B.assign(size_t(n), 0.0);
        if (n >= 2) trace.B[1] = 1.0;
    }

    int64_t y = m;  // Y_{n-1}
    int64_t x = 1;
    double log_phi_n1 = 0.0;
    double p0 = 0.0;
    if (full) trace.Y[size_t(n - 1)] = y;

    for (int64_t k = n - 1; k >= 1; --k) {
        while (next_probe < probe_levels.size() &&
               probe_levels[next_probe].first >= k) {
            const auto [level, idx] = probe_levels[next_probe];
            if (level == k) {
                const double pos =
                    std::clamp(opts.probe_positions[idx], 0.0, double(n - 1));
                const auto lo = int64_t(std::floor(pos));
                if (level == lo) probe_floor[idx] = double(y);
                const double frac = pos - double(lo);
                if (level == lo + 1 && frac > 0.0)
                    trace.y_probes[idx] += frac * double(y);
            }
            ++next_probe;
        }
        if (want_xi && k == trace.n1) trace.y_n1 = y;

        int64_t z;
        double b = -1.0;
        if (k == 1) {
            b = 1.0;
            z = y;
        } else if (uniform) {
            b = 1.0 / double(k);
            z = sample_binomial(stream, y, b);
        } else if (full || opts.explicit_beta || (want_xi && k <= trace.n1)) {
            b = sample_beta(stream, m + rho,
                            (2.0 * k - 3.0) * m + (k - 1.0) * rho);
            z = sample_binomial(stream, y, b);
        } else {
            z = sample_beta_binomial(stream, y, m + rho,
                                     (2.0 * k - 3.0) * m + (k - 1.0) * rho);
        }

        if (want_xi && k <= trace.n1 && k >= 2)
            log_phi_n1 += std::log1p(double(m - 1) * b);
        if (track_p0 && b >= 0.0) p0 += hit_probability(b, y);

        const int64_t j = z >= 1 ? 1 : 0;
        x += j;
        const int64_t y_next = (k >= 2) ? y - z + m * j : 0;
        if (full) {
            trace.B[size_t(k)] = uniform && k >= 2 ? 1.0 / double(k) : b;
            trace.Z[size_t(k)] = z;
            trace.J[size_t(k)] = uint8_t(j);
            trace.Y[size_t(k - 1)] = y_next;
        }
        y = y_next;
    }

    // finish interpolated probes
    for (size_t i = 0; i < opts.probe_positions.size(); ++i) {
        const double pos =
            std::clamp(opts.probe_positions[i], 0.0, double(n - 1));
        const auto lo = int64_t(std::floor(pos));
        const double frac = pos - double(lo);
        if (frac == 0.0)
            trace.y_probes[i] = probe_floor[i];
        else
            trace.y_probes[i] += (1.0 - frac) * probe_floor[i];
    }

    trace.x = x;
    trace.p0 = p0;
    if (want_xi) {
        const DerivedConstants c =
            uniform ? uniform_constants(m) : derive_constants(m, rho);
        log_phi_n1 += std::log(double(m));  // the B_1 = 1 factor
        trace.xi = std::exp(log_phi_n1 + std::log(double(trace.y_n1)) -
                            c.kappa * std::log(double(n)));
    }

    if (full) {
        trace.Phi.assign(size_t(n), 1.0);
        trace.W.assign(size_t(n), 0.0);
        trace.A.assign(size_t(n), 0.0);
        trace.M.assign(size_t(n), 0.0);
        trace.P.assign(size_t(n), 0.0);
        double phi = 1.0;  // Phi_0: empty product
        trace.Phi[0] = phi;
        for (int64_t k = 1; k <= n - 1; ++k) {
            phi *= 1.0 + double(m - 1) * trace.B[size_t(k)];
            trace.Phi[size_t(k)] = phi;
            trace.W[size_t(k)] = phi * double(trace.Y[size_t(k)]);
        }
        for (int64_t k = n - 1; k >= 1; --k) {
            trace.A[size_t(k - 1)] =
                trace.A[size_t(k)] +
                double(m) * trace.Phi[size_t(k - 1)] *
                    compensator_increment(trace.B[size_t(k)], trace.Y[size_t(k)]);
            trace.P[size_t(k - 1)] =
                trace.P[size_t(k)] +
                hit_probability(trace.B[size_t(k)], trace.Y[size_t(k)]);
        }
        for (int64_t k = 0; k <= n - 1; ++k)
            trace.M[size_t(k)] = trace.W[size_t(k)] + trace.A[size_t(k)];
    }
    return trace;
}

namespace {

template <typename Vec>
double interpolate_level(const Vec& arr, double pos) {
    const auto lo = int64_t(std::floor(pos));
    const double frac = pos - double(lo);
    if (frac == 0.0) return double(arr[size_t(lo)]);
    return (1.0 - frac) * double(arr[size_t(lo)]) +
           frac * double(arr[size_t(lo + 1)]);
}

} // namespace

CurveTable extract_scaled_curves(const DescendantTrace& trace,
                                 const std::vector<double>& t_grid) {
    if (trace.Y.empty())
        throw std::invalid_argument("extract_scaled_curves: needs a full trace");
    const DerivedConstants c = trace.uniform ? uniform_constants(trace.m)
                                             : derive_constants(trace.m, trace.rho);
    const double n_nu = std::pow(double(trace.n), c.nu);
    const double n_kappa = std::pow(double(trace.n), c.kappa);
    CurveTable table;
    table.t = t_grid;
    for (const double t : t_grid) {
        if (!(t > 0.0))
            throw std::invalid_argument("extract_scaled_curves: need t > 0");
        // constant extension beyond the last level
        const double pos = std::min(t * n_nu, double(trace.n - 1));
        table.Y.push_back(interpolate_level(trace.Y, pos) / n_nu);
        table.W.push_back(interpolate_level(trace.W, pos) / n_kappa);
        table.A.push_back(interpolate_level(trace.A, pos) / n_kappa);
        table.P.push_back(interpolate_level(trace.P, pos) / n_nu);
    }
    return table;
}

void write_trace_csv(const DescendantTrace& trace, std::ostream& out) {
    if (trace.Y.empty())
        throw std::invalid_argument("write_trace_csv: needs a full trace");
    out << "k,Y,Z,J,Phi,W,A,M,P\n";
    char buf[512];
    for (int64_t k = 0; k <= trace.n - 1; ++k) {
        snprintf(buf, sizeof(buf),
                 "%lld,%lld,%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 (long long)k, (long long)trace.Y[size_t(k)],
                 (long long)trace.Z[size_t(k)], int(trace.J[size_t(k)]),
                 trace.Phi[size_t(k)], trace.W[size_t(k)], trace.A[size_t(k)],
                 trace.M[size_t(k)], trace.P[size_t(k)]);
        out << buf;
    }
}

} // namespace desclab
