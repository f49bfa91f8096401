// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrx/channel/profile.hpp"
#include "hrx/decider/hybrid.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::harness {

/// "mixed" draws each block's channel uniformly over the 18 registry indices
/// plus the anomaly.
inline constexpr const char* kMixedChannel = "mixed";

struct SweepConfig {
    phy::FrameConfig frame;
    // any of traditional, perfect, neural, hybrid, genie
    std::vector<std::string> receivers{"traditional", "perfect", "neural", "hybrid", "genie"};
    std::string channel = kMixedChannel;
    channel::ChannelId anomaly{4, 5.0};
    std::vector<double> snr_db{0, 5, 10, 15, 20};
    int blocks = 200;
    std::uint64_t seed = 7;
    decider::Arch arch = decider::Arch::I;
    int threads = 1;

    void validate() const;
};

struct SweepRow {
    std::string receiver;
    std::string channel_index;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t blocks = 0;
    std::uint64_t block_errors = 0;
    std::uint64_t info_bits = 0;
    std::uint64_t info_bit_errors = 0;
    std::uint64_t routed_neural = 0;
    std::uint64_t seed = 0;

    double uncoded_ber() const;
    double bler() const;
    double coded_ber() const;
    double route_fraction_neural() const;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // SNR-major, receivers in config order

    const SweepRow& row(const std::string& receiver, double snr_db) const;
};

inline constexpr const char* kCsvHeader =
    "receiver,channel_index,snr_db,bits,bit_errors,uncoded_ber,blocks,block_errors,bler,coded_ber,"
    "route_fraction_neural,seed";

/// Block b at SNR point s uses the stream (seed, s * blocks + b); every
/// receiver sees the same received grid. The result is independent of the
/// thread count. Throws LoadError before simulating if a receiver needs a part
/// that is missing. "genie" picks per block between the traditional receiver
/// and the neural side of the architecture (the enhancer under Arch II).
SweepResult run_sweep(const SweepConfig& config, const decider::HybridParts& parts);

std::string to_csv(const SweepResult& result);

/// JSON document with the rows, an echo of the configuration and the build id.
std::string to_json(const SweepResult& result, const SweepConfig& config);

/// Identifier baked in at configure time (git describe, or "unknown").
std::string build_id();

}  // namespace hrx::harness
