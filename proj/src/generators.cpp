#include "desclab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace desclab {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::sequential: return "sequential";
        case Variant::polya_urn: return "polya";
        case Variant::self_loop: return "selfloop";
        case Variant::uniform: return "uniform";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "sequential") return Variant::sequential;
    if (name == "polya" || name == "polya-urn") return Variant::polya_urn;
    if (name == "selfloop" || name == "self-loop") return Variant::self_loop;
    if (name == "uniform") return Variant::uniform;
    throw std::invalid_argument("unknown variant: " + name);
}

void ModelParams::validate() const {
    if (n < 1) throw std::invalid_argument("params: need n >= 1");
    if (m < 1) throw std::invalid_argument("params: need m >= 1");
    if (variant != Variant::uniform && !(rho > -double(m)))
        throw std::invalid_argument("params: need rho > -m");
    if (variant != Variant::sequential && m < 2)
        throw std::invalid_argument("params: m = 1 is only supported by the sequential model");
    if (variant == Variant::self_loop && !(rho > -1.0))
        throw std::invalid_argument("params: self-loop model needs rho > -1 for positive weights");
}

uint64_t uniform_below(RngStream& stream, uint64_t bound) {
    return uint64_t((unsigned __int128)(stream.next_u64()) * bound >> 64);
}

void export_edge_list(const Digraph& graph, const ModelParams& params,
                      std::ostream& out) {
    out << "# pa-graph n=" << graph.n << " m=" << graph.m
        << " rho=" << params.rho << " variant=" << variant_name(params.variant)
        << " seed=" << params.master_seed << "\n";
    for (int64_t k = 2; k <= graph.n; ++k)
        for (int e = 0; e < graph.m; ++e)
            out << k << '\t' << graph.target(k, e) << '\n';
}

namespace {

// One uniform covers both the slot pick and the rho-uniform branch: a draw
// below the slot mass indexes a slot, the remainder maps to a vertex.
int64_t mixture_pick(RngStream& stream, const std::vector<int32_t>& slots,
                     double extra_slot_weight, double rho, int64_t n_vertices) {
    const double slot_mass = double(slots.size()) + extra_slot_weight;
    const double total = slot_mass + rho * double(n_vertices);
    const double w = stream.next_u01() * total;
    if (w < double(slots.size()))
        return slots[std::min(size_t(w), slots.size() - 1)];
    if (w < slot_mass) return 0;  // the virtual slot, meaning "current vertex"
    const auto v = int64_t((w - slot_mass) / rho);
    return 1 + std::min(v, n_vertices - 1);
}

} // namespace

namespace {

Digraph sequential_skeleton(const ModelParams& params) {
    Digraph graph;
    graph.n = params.n;
    graph.m = params.m;
    graph.allows_loops = false;
    if (params.n < 2) return graph;
    graph.targets.assign(size_t(params.n - 1) * params.m, 0);
    for (int e = 0; e < params.m; ++e) graph.target(2, e) = 1;
    return graph;
}

} // namespace

Digraph gen_sequential(const ModelParams& params, RngStream& stream) {
    if (params.variant != Variant::sequential)
        throw std::invalid_argument("gen_sequential: wrong variant");
    params.validate();
    if (params.rho < 0.0) return gen_sequential_scan(params, stream);
    const int64_t n = params.n;
    const int m = params.m;
    const double rho = params.rho;

    Digraph graph = sequential_skeleton(params);
    if (n <= 2) return graph;

    std::vector<int32_t> slots;
    slots.reserve(size_t(2 * m) * n);
    for (int e = 0; e < m; ++e) {
        slots.push_back(1);
        slots.push_back(2);
    }
    for (int64_t k = 3; k <= n; ++k) {
        for (int e = 0; e < m; ++e) {
            const int64_t t = mixture_pick(stream, slots, 0.0, rho, k - 1);
            graph.target(k, e) = t;
            slots.push_back(int32_t(t));
        }
        for (int e = 0; e < m; ++e) slots.push_back(int32_t(k));
    }
    return graph;
}

Digraph gen_sequential_scan(const ModelParams& params, RngStream& stream) {
    if (params.variant != Variant::sequential)
        throw std::invalid_argument("gen_sequential_scan: wrong variant");
    params.validate();
    const int64_t n = params.n;
    const int m = params.m;
    const double rho = params.rho;

    Digraph graph = sequential_skeleton(params);
    if (n <= 2) return graph;

    std::vector<double> weight(size_t(n) + 1, 0.0);
    weight[1] = m + rho;
    weight[2] = m + rho;
    double total = 2.0 * m + 2.0 * rho;
    for (int64_t k = 3; k <= n; ++k) {
        for (int e = 0; e < m; ++e) {
            double w = stream.next_u01() * total;
            int64_t t = k - 1;
            for (int64_t j = 1; j < k - 1; ++j) {
                w -= weight[j];
                if (w < 0.0) { t = j; break; }
            }
            graph.target(k, e) = t;
            weight[t] += 1.0;
            total += 1.0;
        }
        weight[k] = m + rho;
        total += m + rho;
    }
    return graph;
}

std::vector<double> sample_beta_sequence(int64_t n, int m, double rho,
                                         RngStream& stream) {
    std::vector<double> betas(size_t(std::max<int64_t>(n, 1)), 0.0);
    if (n >= 2) betas[1] = 1.0;
    for (int64_t j = 2; j <= n - 1; ++j)
        betas[size_t(j)] =
            sample_beta(stream, m + rho, (2.0 * j - 3.0) * m + (j - 1.0) * rho);
    return betas;
}

std::vector<double> s_products(const std::vector<double>& betas) {
    const int64_t n = int64_t(betas.size());
    std::vector<double> S(size_t(n), 0.0);
    S[size_t(n - 1)] = 1.0;
    for (int64_t j = n - 2; j >= 0; --j)
        S[size_t(j)] = S[size_t(j + 1)] * (1.0 - betas[size_t(j + 1)]);
    return S;
}

int64_t resolve_target(const std::vector<double>& S, int64_t k, double U) {
    const auto first = S.begin();
    const auto last = S.begin() + k;  // S[0..k-1]
    const auto pos = std::upper_bound(first, last, U);
    if (pos == last || pos == first)
        throw std::logic_error("resolve_target: U outside [0, S[k-1])");
    return pos - first;
}

void polya_targets_given_S(const std::vector<double>& S, int m, Digraph& graph,
                           RngStream& stream) {
    for (int64_t k = 2; k <= graph.n; ++k) {
        const double upper = S[size_t(k - 1)];
        for (int e = 0; e < m; ++e) {
            const double u = upper * stream.next_u01();
            graph.target(k, e) = resolve_target(S, k, u);
        }
    }
}

namespace {

void polya_targets_log_space(const std::vector<double>& betas, int m,
                             Digraph& graph, RngStream& stream) {
    const int64_t n = graph.n;
    std::vector<double> logS(size_t(n), 0.0);
    logS[size_t(n - 1)] = 0.0;
    for (int64_t j = n - 2; j >= 1; --j)
        logS[size_t(j)] = logS[size_t(j + 1)] + std::log1p(-betas[size_t(j + 1)]);
    logS[0] = -std::numeric_limits<double>::infinity();
    for (int64_t k = 2; k <= n; ++k) {
        for (int e = 0; e < m; ++e) {
            const double lu = logS[size_t(k - 1)] + std::log(stream.next_u01_oo());
            const auto pos =
                std::upper_bound(logS.begin(), logS.begin() + k, lu);
            graph.target(k, e) = pos - logS.begin();
        }
    }
}

} // namespace

std::pair<Digraph, BetaTrace> gen_polya(const ModelParams& params,
                                        RngStream& stream,
                                        const PolyaOptions& opts) {
    if (params.variant != Variant::polya_urn)
        throw std::invalid_argument("gen_polya: wrong variant");
    params.validate();
    if (params.n < 2) throw std::invalid_argument("gen_polya: need n >= 2");

    Digraph graph;
    graph.n = params.n;
    graph.m = params.m;
    graph.allows_loops = false;
    graph.targets.assign(size_t(params.n - 1) * params.m, 0);

    BetaTrace trace;
    trace.B = sample_beta_sequence(params.n, params.m, params.rho, stream);
    if (opts.log_space) {
        polya_targets_log_space(trace.B, params.m, graph, stream);
        trace.S = s_products(trace.B);
    } else {
        trace.S = s_products(trace.B);
        polya_targets_given_S(trace.S, params.m, graph, stream);
    }
    return {std::move(graph), std::move(trace)};
}

std::pair<Digraph, BetaTrace> gen_selfloop(const ModelParams& params,
                                           RngStream& stream) {
    if (params.variant != Variant::self_loop)
        throw std::invalid_argument("gen_selfloop: wrong variant");
    params.validate();
    const int64_t n = params.n;
    const int m = params.m;
    const double rho = params.rho;

    Digraph graph;
    graph.n = n;
    graph.m = m;
    graph.allows_loops = true;
    BetaTrace trace;
    trace.N.assign(size_t(n) + 1, 0);
    trace.N[1] = m;
    if (n < 2) return {std::move(graph), std::move(trace)};
    graph.targets.assign(size_t(n - 1) * m, 0);

    if (rho >= 0.0) {
        std::vector<int32_t> slots;
        slots.reserve(size_t(2 * m) * n);
        for (int e = 0; e < 2 * m; ++e) slots.push_back(1);
        for (int64_t k = 2; k <= n; ++k) {
            for (int e = 0; e < m; ++e) {
                int64_t t = mixture_pick(stream, slots, 1.0, rho, k);
                if (t == 0) t = k;  // virtual slot resolves to the new vertex
                graph.target(k, e) = t;
                if (t == k) {
                    ++trace.N[size_t(k)];
                    slots.push_back(int32_t(k));
                    slots.push_back(int32_t(k));
                } else {
                    slots.push_back(int32_t(t));
                    slots.push_back(int32_t(k));
                }
            }
        }
    } else {
        std::vector<double> weight(size_t(n) + 1, 0.0);
        weight[1] = 2.0 * m + rho;
        double placed_total = 2.0 * m;
        for (int64_t k = 2; k <= n; ++k) {
            int loops = 0;
            for (int e = 0; e < m; ++e) {
                const double self_weight = double(e) + 1.0 + double(loops) + rho;
                const double total =
                    placed_total + 2.0 * double(e) + 1.0 + double(k) * rho;
                double w = stream.next_u01() * total;
                int64_t t = k;
                if (w < total - self_weight) {
                    t = k - 1;
                    for (int64_t j = 1; j < k - 1; ++j) {
                        w -= weight[j];
                        if (w < 0.0) { t = j; break; }
                    }
                }
                graph.target(k, e) = t;
                if (t == k) {
                    ++loops;
                } else {
                    weight[t] += 1.0;
                }
            }
            trace.N[size_t(k)] = loops;
            weight[k] = double(m) + double(loops) + rho;
            placed_total += 2.0 * m;
        }
    }
    return {std::move(graph), std::move(trace)};
}

Digraph gen_uniform(int m, int64_t n, RngStream& stream) {
    if (m < 2) throw std::invalid_argument("gen_uniform: need m >= 2");
    if (n < 1) throw std::invalid_argument("gen_uniform: need n >= 1");
    Digraph graph;
    graph.n = n;
    graph.m = m;
    graph.allows_loops = false;
    if (n < 2) return graph;
    graph.targets.assign(size_t(n - 1) * m, 0);
    for (int64_t k = 2; k <= n; ++k)
        for (int e = 0; e < m; ++e)
            graph.target(k, e) = 1 + int64_t(uniform_below(stream, uint64_t(k - 1)));
    return graph;
}

} // namespace desclab
