// SPDX-License-Identifier: Apache-2.0
#include "hrx/mathdsp/rng.hpp"

#include <cmath>
#include <numbers>

#include "hrx/errors.hpp"

namespace hrx {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint32_t kSplitTag = 0x5EED5117u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
inline std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> ctr) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint32_t RngStream::next_u32() {
    if (buffered_ == 0) {
        buffer_ = philox4x32({lo32(seed_), hi32(seed_)},
                             {lo32(counter_), hi32(counter_), lo32(stream_id_), hi32(stream_id_)});
        ++counter_;
        buffered_ = 4;
    }
    return buffer_[static_cast<std::size_t>(4 - buffered_--)];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double RngStream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw ValidationError("RngStream::below requires n > 0");
    // rejection keeps the draw exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

cplx RngStream::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

RngStream split_stream(const RngStream& parent, std::uint64_t child_id) {
    const std::uint64_t s = parent.seed();
    const std::uint64_t p = parent.stream_id();
    const auto block = philox4x32({lo32(s) ^ kSplitTag, hi32(s)},
                                  {lo32(child_id), hi32(child_id), lo32(p), hi32(p) ^ kSplitTag});
    const std::uint64_t child = (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
    return RngStream(s, child);
}

ComplexVec gaussian_noise(RngStream& rng, std::size_t n, double variance) {
    if (!(variance >= 0.0)) throw ConfigError("noise variance must be non-negative");
    ComplexVec out(n);
    if (variance == 0.0) return out;
    const double sigma = std::sqrt(variance);
    for (auto& v : out) v = sigma * rng.complex_normal();
    return out;
}

}  // namespace hrx
