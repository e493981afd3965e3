#include "desclab/rng.hpp"

#include <cmath>
#include <limits>

namespace desclab {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& ctr, uint32_t k0, uint32_t k1) {
    const uint64_t p0 = uint64_t(kPhiloxM0) * ctr[0];
    const uint64_t p1 = uint64_t(kPhiloxM1) * ctr[2];
    const std::array<uint32_t, 4> out = {
        uint32_t(p1 >> 32) ^ ctr[1] ^ k0,
        uint32_t(p1),
        uint32_t(p0 >> 32) ^ ctr[3] ^ k1,
        uint32_t(p0),
    };
    ctr = out;
}

} // namespace

std::array<uint32_t, 4> philox4x32_10(const std::array<uint32_t, 4>& counter,
                                      const std::array<uint32_t, 2>& key) {
    std::array<uint32_t, 4> ctr = counter;
    uint32_t k0 = key[0];
    uint32_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return ctr;
}

std::array<uint32_t, 4> RngStream::philox_block(uint64_t block_index) const {
    const std::array<uint32_t, 4> counter = {
        uint32_t(block_index), uint32_t(block_index >> 32),
        uint32_t(stream_id_), uint32_t(stream_id_ >> 32)};
    const std::array<uint32_t, 2> key = {uint32_t(master_seed_),
                                         uint32_t(master_seed_ >> 32)};
    return philox4x32_10(counter, key);
}

double sample_uniform(RngStream& stream) { return stream.next_u01(); }

double sample_exponential(RngStream& stream, double rate) {
    if (rate <= 0.0) throw std::invalid_argument("sample_exponential: rate must be > 0");
    return -std::log(stream.next_u01_oo()) / rate;
}

double sample_normal(RngStream& stream) {
    if (stream.have_spare_normal_) {
        stream.have_spare_normal_ = false;
        return stream.spare_normal_;
    }
    const double u1 = stream.next_u01_oo();
    const double u2 = stream.next_u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    stream.spare_normal_ = r * std::sin(angle);
    stream.have_spare_normal_ = true;
    return r * std::cos(angle);
}

// Marsaglia-Tsang squeeze; shapes below one boosted through shape+1.
double sample_gamma(RngStream& stream, double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
        throw std::invalid_argument("sample_gamma: shape and scale must be > 0");
    if (shape < 1.0) {
        const double u = stream.next_u01_oo();
        return sample_gamma(stream, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = sample_normal(stream);
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = stream.next_u01_oo();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

double sample_beta(RngStream& stream, double a, double b) {
    if (a <= 0.0 || b <= 0.0)
        throw std::invalid_argument("sample_beta: shapes must be > 0");
    const double g1 = sample_gamma(stream, a, 1.0);
    const double g2 = sample_gamma(stream, b, 1.0);
    double r = g1 / (g1 + g2);
    // keep the value in the open interval even when one gamma underflows
    if (r <= 0.0) r = std::numeric_limits<double>::min();
    if (r >= 1.0) r = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return r;
}

namespace {

// Inversion by CDF walk; requires count*p modest so the walk stays short.
int64_t binomial_inversion(RngStream& stream, int64_t count, double p) {
    const double q = 1.0 - p;
    const double ratio = p / q;
    double pmf = std::exp(double(count) * std::log1p(-p));
    double cdf = pmf;
    const double u = stream.next_u01();
    int64_t z = 0;
    while (u > cdf && z < count) {
        pmf *= ratio * double(count - z) / double(z + 1);
        cdf += pmf;
        ++z;
        // guard against stalls once cdf saturates in floating point
        if (pmf < 1e-320 && u > cdf) return z;
    }
    return z;
}

// Hormann's transformed-rejection BTRS, for count*p above the inversion cutoff.
// Requires p <= 0.5 (callers flip) and count*p >= 10.
int64_t binomial_btrs(RngStream& stream, int64_t count, double p) {
    const double n = double(count);
    const double q = 1.0 - p;
    const double spq = std::sqrt(n * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((n + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0);
    for (;;) {
        const double u = stream.next_u01() - 0.5;
        double v = stream.next_u01();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > n) continue;
        if (us >= 0.07 && v <= v_r) return int64_t(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(kd + 1.0) - std::lgamma(n - kd + 1.0) +
                     (kd - m) * lpq)
            return int64_t(kd);
    }
}

} // namespace

int64_t sample_binomial(RngStream& stream, int64_t count, double p) {
    if (count < 0) throw std::invalid_argument("sample_binomial: count must be >= 0");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_binomial: p must be in [0,1]");
    if (count == 0 || p == 0.0) return 0;
    if (p == 1.0) return count;
    const bool flipped = p > 0.5;
    const double pp = flipped ? 1.0 - p : p;
    const double np = double(count) * pp;
    int64_t z;
    if (np <= 30.0)
        z = binomial_inversion(stream, count, pp);
    else
        z = binomial_btrs(stream, count, pp);
    return flipped ? count - z : z;
}

int64_t sample_beta_binomial(RngStream& stream, int64_t count, double a, double b) {
    if (count < 0) throw std::invalid_argument("sample_beta_binomial: count must be >= 0");
    if (a <= 0.0 || b <= 0.0)
        throw std::invalid_argument("sample_beta_binomial: shapes must be > 0");
    if (count == 0) return 0;

    // P(Z=0) = prod_{i<count} (b+i)/(a+b+i); collapses to `a` factors when a
    // is integral, via Gamma(b+count)Gamma(a+b) / (Gamma(b)Gamma(a+b+count)).
    double p0;
    const double a_round = std::nearbyint(a);
    if (a_round == a && a <= 16.0) {
        p0 = 1.0;
        for (int i = 0; i < int(a); ++i)
            p0 *= (b + i) / (b + double(count) + i);
    } else if (count <= 64) {
        p0 = 1.0;
        for (int64_t i = 0; i < count; ++i)
            p0 *= (b + double(i)) / (a + b + double(i));
    } else {
        p0 = std::exp(std::lgamma(b + double(count)) - std::lgamma(b) +
                      std::lgamma(a + b) - std::lgamma(a + b + double(count)));
    }

    const double u = stream.next_u01();
    if (u < p0) return 0;

    double pmf = p0;
    double cdf = p0;
    int64_t z = 0;
    while (z < count) {
        // pmf ratio of the beta-binomial recurrence
        pmf *= (double(count - z) * (a + double(z))) /
               (double(z + 1) * (b + double(count - z - 1)));
        cdf += pmf;
        ++z;
        if (u < cdf) break;
    }
    return z;
}

} // namespace desclab
