// Counter-based random streams (Philox4x32-10).
//
// Every stochastic routine in rusamp takes an explicit RngStream. A stream is
// identified by (seed, stream id); substream(k) derives an independent child
// stream, so parallel workers can draw from disjoint sequences while the
// combined result stays a pure function of the root seed.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rusamp {

/// One Philox4x32-10 block: counter and key in, four 32-bit words out.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform double in (0, 1); safe to take logarithms of.
    double uniform_open();
    /// Standard normal deviate (Box-Muller, no cached pair).
    double normal();

    /// Independent child stream. Does not advance this stream.
    RngStream substream(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;  // words consumed from block_
};

}  // namespace rusamp
