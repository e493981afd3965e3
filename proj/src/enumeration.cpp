#include "desclab/enumeration.hpp"

#include <cmath>
#include <stdexcept>

namespace desclab {

int64_t tuple_count(int64_t n, int m) {
    int64_t total = 1;
    for (int64_t k = 3; k <= n; ++k)
        for (int e = 0; e < m; ++e) total *= (k - 1);
    return total;
}

namespace {

struct Enumerator {
    int64_t n;
    int m;
    double rho;
    std::vector<double> degree;  // 1-based
    std::vector<double> probs;
    std::vector<int64_t> radix_base;  // cumulative index factors

    void walk(int64_t k, int edge, int64_t index, double prob) {
        if (k > n) {
            probs[size_t(index)] += prob;
            return;
        }
        // weight of j: degree (within-step placements already folded in) + rho
        double total = 0.0;
        for (int64_t j = 1; j < k; ++j) total += degree[size_t(j)] + rho;
        for (int64_t j = 1; j < k; ++j) {
            const double w = (degree[size_t(j)] + rho) / total;
            degree[size_t(j)] += 1.0;
            const int64_t next_index = index * (k - 1) + (j - 1);
            if (edge + 1 == m) {
                degree[size_t(k)] += m;  // vertex k's endpoints join the pool
                walk(k + 1, 0, next_index, prob * w);
                degree[size_t(k)] -= m;
            } else {
                walk(k, edge + 1, next_index, prob * w);
            }
            degree[size_t(j)] -= 1.0;
        }
    }
};

} // namespace

std::vector<double> enumerate_sequential_exact(int64_t n, int m, double rho) {
    if (n < 2 || n > 6) throw std::invalid_argument("enumerate: need 2 <= n <= 6");
    if (m < 1) throw std::invalid_argument("enumerate: need m >= 1");
    if (!(rho > -double(m))) throw std::invalid_argument("enumerate: need rho > -m");
    Enumerator en;
    en.n = n;
    en.m = m;
    en.rho = rho;
    en.degree.assign(size_t(n) + 1, 0.0);
    // after the forced vertex-2 step both endpoints carry degree m
    en.degree[1] = m;
    en.degree[2] = m;
    en.probs.assign(size_t(tuple_count(n, m)), 0.0);
    if (n == 2) {
        en.probs[0] = 1.0;
        return en.probs;
    }
    en.walk(3, 0, 0, 1.0);
    return en.probs;
}

int64_t tuple_index(const Digraph& graph) {
    int64_t index = 0;
    for (int64_t k = 3; k <= graph.n; ++k)
        for (int e = 0; e < graph.m; ++e)
            index = index * (k - 1) + (graph.target(k, e) - 1);
    return index;
}

} // namespace desclab
