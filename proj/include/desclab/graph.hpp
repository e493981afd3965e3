#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace desclab {

enum class Variant { sequential, polya_urn, self_loop, uniform };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ModelParams {
    Variant variant = Variant::polya_urn;
    int m = 2;
    double rho = 0.0;
    int64_t n = 1;
    uint64_t master_seed = 0;

    void validate() const;  // throws std::invalid_argument
};

// Out-edge array: vertex k in [2,n] owns entries (k-2)*m .. (k-2)*m + m-1.
// Vertex 1 never has entries; in the self-loop model its m loops are implicit
// and show up only in BetaTrace::N.
struct Digraph {
    int64_t n = 0;
    int m = 0;
    bool allows_loops = false;
    std::vector<int64_t> targets;

    int64_t target(int64_t k, int edge) const {
        return targets[size_t(k - 2) * m + edge];
    }
    int64_t& target(int64_t k, int edge) {
        return targets[size_t(k - 2) * m + edge];
    }
};

struct BetaTrace {
    std::vector<double> B;   // B[j] for j in [1, n-1], B[1] = 1
    std::vector<double> S;   // S[j] for j in [0, n-1], nondecreasing, S[0]=0
    std::vector<int> N;      // self-loop counts, N[i] for i in [1, n]
};

void export_edge_list(const Digraph& graph, const ModelParams& params,
                      std::ostream& out);

} // namespace desclab
