#pragma once

#include <cstdint>

#include "desclab/rng.hpp"

namespace desclab {

struct YuleSnapshot {
    int m = 0;
    double x = 1.0;      // time-changed clock position in (0,1]
    int64_t count = 0;   // particles alive at x
    double scaled = 0.0; // x^{m-1} * count
};

struct YuleResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Branching process with m-fold splits and unit-exponential lifetimes, run
// from m particles to time -log(x).  Superposed waiting times: the next split
// arrives after Exp(count).
YuleSnapshot yule_at(int m, double x, RngStream& stream,
                     int64_t max_particles = 100000000);

} // namespace desclab
