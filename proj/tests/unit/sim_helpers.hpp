// SPDX-License-Identifier: Apache-2.0
// Small link-simulation helpers shared by receiver tests.
#pragma once

#include <cmath>
#include <vector>

#include "hrx/channel.hpp"
#include "hrx/phy.hpp"

namespace hrx::test {

inline double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Rayleigh-averaged QPSK bit error probability at mean Eb/N0 = gamma.
inline double rayleigh_qpsk_ber(double gamma) { return 0.5 * (1.0 - std::sqrt(gamma / (1.0 + gamma))); }

inline double db(double x) { return std::pow(10.0, x / 10.0); }

struct Block {
    phy::TxFrame tx;
    channel::ChannelRealization h;
    phy::ResourceGrid rx;
};

/// Uncoded block: random data bits on every data RE.
inline Block uncoded_block(const channel::ChannelProfile& profile, const phy::FrameConfig& cfg, double snr_db,
                           RngStream& rng) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(cfg.data_bits()));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    Block blk;
    blk.tx = phy::build_grid(bits, cfg);
    blk.h = channel::realize(profile, cfg, rng);
    blk.rx = channel::apply(blk.tx.grid, blk.h, snr_db, cfg, rng);
    return blk;
}

/// Error counts per block, with a standard error that respects the
/// correlation of bits within a block (batch means).
struct BerEstimate {
    double errors = 0, bits = 0, sum_sq = 0;
    int blocks = 0;
    void add(std::size_t e, std::size_t n) {
        errors += static_cast<double>(e);
        bits += static_cast<double>(n);
        const double r = static_cast<double>(e) / static_cast<double>(n);
        sum_sq += r * r;
        ++blocks;
    }
    double ber() const { return errors / bits; }
    double standard_error() const {
        const double m = ber();
        const double var = (sum_sq / blocks - m * m) * blocks / (blocks - 1.0);
        return std::sqrt(std::max(var, 0.0) / blocks);
    }
};

}  // namespace hrx::test
