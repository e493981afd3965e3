#pragma once

#include <cstdint>
#include <array>
#include <stdexcept>

namespace desclab {

// Counter-based stream built on Philox4x32-10 (Salmon et al., SC 2011).
// A (master_seed, stream_id, draw index) triple fully determines every
// variate, independent of which thread consumes the stream.
class RngStream {
public:
    RngStream(uint64_t master_seed, uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id) {}

    uint64_t master_seed() const { return master_seed_; }
    uint64_t stream_id() const { return stream_id_; }

    uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto block = philox_block(block_index_++);
        spare_ = (uint64_t(block[2]) << 32) | block[3];
        have_spare_ = true;
        return (uint64_t(block[0]) << 32) | block[1];
    }

    // uniform on [0,1), 53-bit resolution
    double next_u01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1); safe as a log() argument
    double next_u01_oo() { return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

    std::array<uint32_t, 4> philox_block(uint64_t block_index) const;

private:
    uint64_t master_seed_;
    uint64_t stream_id_;
    uint64_t block_index_ = 0;
    uint64_t spare_ = 0;
    bool have_spare_ = false;
    double spare_normal_ = 0.0;
    bool have_spare_normal_ = false;

    friend double sample_normal(RngStream&);
};

inline RngStream make_stream(uint64_t master_seed, uint64_t stream_id) {
    return RngStream(master_seed, stream_id);
}

// Raw Philox4x32-10 keyed bijection; exposed for known-answer tests.
std::array<uint32_t, 4> philox4x32_10(const std::array<uint32_t, 4>& counter,
                                      const std::array<uint32_t, 2>& key);

double sample_uniform(RngStream& stream);                       // [0,1)
double sample_exponential(RngStream& stream, double rate = 1.0);
double sample_normal(RngStream& stream);                        // standard normal
double sample_gamma(RngStream& stream, double shape, double scale = 1.0);
double sample_beta(RngStream& stream, double a, double b);
int64_t sample_binomial(RngStream& stream, int64_t count, double p);

// Z ~ BetaBinomial(count; a, b): a binomial whose success probability is an
// integrated-out Beta(a,b) draw. Identical in law to
//   B = sample_beta(a, b); Z = sample_binomial(count, B)
// but O(1) work per draw when a is a small integer.
int64_t sample_beta_binomial(RngStream& stream, int64_t count, double a, double b);

} // namespace desclab
