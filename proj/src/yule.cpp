#include "desclab/yule.hpp"

#include <cmath>
#include <stdexcept>

namespace desclab {

YuleSnapshot yule_at(int m, double x, RngStream& stream, int64_t max_particles) {
    if (m < 2) throw std::invalid_argument("yule_at: need m >= 2");
    if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("yule_at: need x in (0,1]");
    const double horizon = -std::log(x);
    double t = 0.0;
    int64_t count = m;
    for (;;) {
        t += sample_exponential(stream, double(count));
        if (t > horizon) break;
        count += m - 1;
        if (count > max_particles)
            throw YuleResourceError("yule_at: particle cap exceeded");
    }
    YuleSnapshot snap;
    snap.m = m;
    snap.x = x;
    snap.count = count;
    snap.scaled = std::pow(x, double(m - 1)) * double(count);
    return snap;
}

} // namespace desclab
