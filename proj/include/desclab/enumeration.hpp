#pragma once

#include <cstdint>
#include <vector>

#include "desclab/graph.hpp"

namespace desclab {

// Exact distribution of the ordered target tuple (vertices 3..n, edges in
// placement order) under the sequential attachment dynamics, by walking every
// branch of the degree-weighted choice tree.  Index layout matches
// tuple_index(); total size prod_{k=3}^{n} (k-1)^m.  Small n only.
std::vector<double> enumerate_sequential_exact(int64_t n, int m, double rho);

// mixed-radix index of a generated graph's target tuple in the table above
int64_t tuple_index(const Digraph& graph);

int64_t tuple_count(int64_t n, int m);

} // namespace desclab
