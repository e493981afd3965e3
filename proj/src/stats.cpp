#include "desclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "desclab/special.hpp"

namespace desclab {

SummaryStats summarize(const std::vector<double>& values) {
    SummaryStats s;
    s.n = int64_t(values.size());
    if (s.n == 0) {
        s.mean = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
        s.variance = s.std_error = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    s.min = s.max = values[0];
    double mean = 0.0;
    double m2 = 0.0;
    int64_t count = 0;
    for (const double x : values) {
        ++count;
        const double d1 = x - mean;
        mean += d1 / double(count);
        m2 += d1 * (x - mean);
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = mean;
    if (s.n >= 2) {
        s.variance = m2 / double(s.n - 1);
        s.std_error = std::sqrt(s.variance / double(s.n));
    } else {
        s.variance = std::numeric_limits<double>::quiet_NaN();
        s.std_error = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

double raw_moment(const std::vector<double>& values, double p) {
    if (values.empty()) throw std::invalid_argument("raw_moment: empty sample");
    double sum = 0.0;
    for (const double x : values) sum += std::pow(x, p);
    return sum / double(values.size());
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = q * double(values.size() - 1);
    const auto lo = size_t(std::floor(pos));
    const double frac = pos - double(lo);
    if (frac == 0.0) return values[lo];
    return (1.0 - frac) * values[lo] + frac * values[lo + 1];
}

double two_sample_ks(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
    size_t i = 0, j = 0;
    double max_gap = 0.0;
    const double na = double(a.size());
    const double nb = double(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        max_gap = std::max(max_gap, std::fabs(double(i) / na - double(j) / nb));
    }
    return max_gap;
}

ChiSquareResult chi_square(const std::vector<int64_t>& observed,
                           const std::vector<double>& expected,
                           double min_expected) {
    if (observed.empty() || observed.size() != expected.size())
        throw std::invalid_argument("chi_square: size mismatch or empty input");
    // pool neighbouring cells until every expected count is large enough
    std::vector<double> exp_pooled;
    std::vector<double> obs_pooled;
    double e_acc = 0.0, o_acc = 0.0;
    for (size_t i = 0; i < observed.size(); ++i) {
        e_acc += expected[i];
        o_acc += double(observed[i]);
        if (e_acc >= min_expected) {
            exp_pooled.push_back(e_acc);
            obs_pooled.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_pooled.empty()) {
            exp_pooled.push_back(e_acc);
            obs_pooled.push_back(o_acc);
        } else {
            exp_pooled.back() += e_acc;
            obs_pooled.back() += o_acc;
        }
    }
    ChiSquareResult r;
    for (size_t i = 0; i < exp_pooled.size(); ++i) {
        const double d = obs_pooled[i] - exp_pooled[i];
        r.statistic += d * d / exp_pooled[i];
    }
    r.dof = int64_t(exp_pooled.size()) - 1;
    r.p_value = r.dof >= 1 ? chi_square_sf(r.statistic, double(r.dof)) : 1.0;
    return r;
}

} // namespace desclab
