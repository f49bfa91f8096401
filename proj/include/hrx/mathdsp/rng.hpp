// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "hrx/mathdsp/fft.hpp"

namespace hrx {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is fully determined by (seed, stream_id); the counter only records
/// how far it has been consumed. Streams are small values: copy one to fork an
/// identical sequence, use split_stream() to derive independent children.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    /// Uniform double in the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal draw.
    double normal();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    cplx complex_normal();

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// One Philox4x32-10 block for the given key and counter words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

/// Child stream, deterministic in (seed, parent stream id, child_id) and
/// independent of how much of the parent has been consumed.
RngStream split_stream(const RngStream& parent, std::uint64_t child_id);

/// i.i.d. CN(0, variance) samples (variance/2 per real dimension).
/// Throws ConfigError on negative variance.
ComplexVec gaussian_noise(RngStream& rng, std::size_t n, double variance);

}  // namespace hrx
