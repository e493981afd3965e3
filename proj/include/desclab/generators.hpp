#pragma once

#include "desclab/graph.hpp"
#include "desclab/rng.hpp"

namespace desclab {

// Sequential attachment: edge endpoints drawn proportional to current degree
// plus rho, within-step placements included.  O(1) per edge for rho >= 0 via
// an endpoint-slot mixture, O(k) weight scan otherwise.
Digraph gen_sequential(const ModelParams& params, RngStream& stream);

// the weight-scan path for any admissible rho; the mixture path must agree
// with it in distribution wherever both apply
Digraph gen_sequential_scan(const ModelParams& params, RngStream& stream);

struct PolyaOptions {
    bool log_space = false;  // carry the S products in log space
};

// Urn representation: independent Beta proportions, cumulative products S,
// targets by binary search of U = S[k-1] * U~ in the half-open S intervals.
std::pair<Digraph, BetaTrace> gen_polya(const ModelParams& params,
                                        RngStream& stream,
                                        const PolyaOptions& opts = {});

// Draw the Beta proportions B[1..n-1] (B[1] = 1) for the urn construction.
std::vector<double> sample_beta_sequence(int64_t n, int m, double rho,
                                         RngStream& stream);
// S[j] = prod_{i=j+1}^{n-1} (1 - B[i]); single backward sweep.
std::vector<double> s_products(const std::vector<double>& betas);
// leftmost i with U in [S[i-1], S[i]); requires 0 <= U < S[k-1]
int64_t resolve_target(const std::vector<double>& S, int64_t k, double U);

// Fill targets for all vertices given precomputed S; exposed so the
// conditional distribution given the Beta draws can be exercised directly.
void polya_targets_given_S(const std::vector<double>& S, int m, Digraph& graph,
                           RngStream& stream);

// Sequential model with self-loops allowed; vertex 1 starts with m loops.
// Weight positivity of the self term requires rho > -1.
std::pair<Digraph, BetaTrace> gen_selfloop(const ModelParams& params,
                                           RngStream& stream);

// Every edge of vertex k targets an independent uniform element of [k-1].
Digraph gen_uniform(int m, int64_t n, RngStream& stream);

// unbiased integer in [0, bound)
uint64_t uniform_below(RngStream& stream, uint64_t bound);

} // namespace desclab
