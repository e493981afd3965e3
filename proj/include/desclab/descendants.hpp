#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "desclab/graph.hpp"
#include "desclab/rng.hpp"
#include "desclab/theory.hpp"

namespace desclab {

// vertices reachable from vertex n along directed edges, n itself included
int64_t count_descendants(const Digraph& graph);

struct TraceOptions {
    enum class Depth {
        x_only,  // descendant count plus any probes; O(1) memory
        xi,      // also Y at n1 and the scaled tail statistic Xi
        full,    // every per-level array
    };
    Depth depth = Depth::x_only;
    // sample the Beta proportions explicitly instead of integrating them out
    // of the level draws (full mode always does)
    bool explicit_beta = false;
    // record Y at these fractional indices (interpolated between levels)
    std::vector<double> probe_positions;
};

struct DescendantTrace {
    int64_t n = 0;
    int m = 0;
    double rho = 0.0;
    bool uniform = false;
    int64_t x = 0;       // descendant count
    double xi = 0.0;     // Phi_{n1} Y_{n1} / n^kappa
    int64_t y_n1 = 0;    // Y at level n1 = floor(n / log n)
    int64_t n1 = 0;
    double p0 = 0.0;     // accumulated conditional hit probabilities
    std::vector<double> y_probes;  // matches TraceOptions::probe_positions

    // full-depth arrays, indexed by level k = 0..n-1
    std::vector<int64_t> Y, Z;
    std::vector<uint8_t> J;
    std::vector<double> B, Phi, W, A, M, P;
};

// Downward sweep of the level process: at level k the number of edges still
// crossing is thinned by a Beta-mixed binomial and replenished with m fresh
// edges whenever the level is hit.  Supports the urn and uniform variants.
DescendantTrace simulate_recursion(const ModelParams& params, RngStream& stream,
                                   const TraceOptions& opts = {});

struct CurveTable {
    std::vector<double> t;
    std::vector<double> Y;  // Y_{t n^nu} / n^nu
    std::vector<double> W;  // W_{t n^nu} / n^kappa
    std::vector<double> A;  // A_{t n^nu} / n^kappa
    std::vector<double> P;  // P_{t n^nu} / n^nu
};

// scaled curve read-out of a full trace; constant extension past level n-1
CurveTable extract_scaled_curves(const DescendantTrace& trace,
                                 const std::vector<double>& t_grid);

// CSV with columns k,Y,Z,J,Phi,W,A,M,P (full traces only)
void write_trace_csv(const DescendantTrace& trace, std::ostream& out);

} // namespace desclab
