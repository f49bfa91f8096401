// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hrx::channel {

struct Tap {
    double delay = 0.0;  // seconds
    double power = 0.0;  // linear, profile powers sum to 1
};

/// Indexed power-delay profile with its fading statistics.
struct ChannelProfile {
    int index = 0;           // 0..17, or -1 for anomalies
    std::string model;       // "TDL-A", "TDL-B", "TDL-C", "flat", ...
    std::vector<Tap> pdp;
    double doppler_coherence = 1.0;  // AR(1) coefficient between consecutive OFDM symbols
    double spatial_corr = 0.0;       // exponential correlation between neighbouring antennas
    double rms_delay_spread = 0.0;   // seconds
    bool anomalous = false;          // allowed to exceed the cyclic prefix
    bool fading = true;              // false: every tap has the fixed gain sqrt(power)

    std::string label() const;
};

/// Power-weighted standard deviation of the tap delays.
double rms_delay_spread(const std::vector<Tap>& pdp);

/// Normalised TDL table (delays in units of the delay spread, powers in dB).
struct TdlEntry {
    double norm_delay;
    double power_db;
};
const std::vector<TdlEntry>& tdl_table(char model);

/// Builds a TDL profile with the given RMS delay spread. Taps beyond max_delay
/// (if positive) are dropped and the remainder rescaled to the same spread.
ChannelProfile make_tdl(char model, double delay_spread, double max_delay = 0.0);

/// Single tap at zero delay (flat Rayleigh).
ChannelProfile flat_profile();
/// H = 1 on every RE and antenna.
ChannelProfile awgn_profile();

inline constexpr int kNumProfiles = 18;

/// The 18 indexed profiles, built against the default frame's cyclic prefix.
const std::vector<ChannelProfile>& profile_registry();
const ChannelProfile& registry_profile(int index);

/// Human-readable table, one line per profile.
std::string serialize_registry();
std::uint64_t registry_hash();

/// Copy of a registry profile with every delay scaled by `severity` (>= 1).
ChannelProfile anomaly_profile(int base_index, double severity);

/// Registry index, optionally stretched into an anomaly. Text form is the
/// index ("4") or "a<index>x<severity>" ("a4x5"). Two extra ids outside the
/// registry serve oracles: "awgn" (index -1) and "flat" (index -2).
struct ChannelId {
    static constexpr int kAwgn = -1;
    static constexpr int kFlat = -2;

    int index = 0;
    double severity = 1.0;

    bool anomalous() const { return severity != 1.0; }
    std::string str() const;
    bool operator==(const ChannelId&) const = default;
};

/// Throws ConfigError on malformed text or out-of-range values.
ChannelId parse_channel_id(const std::string& text);
ChannelProfile profile_for(const ChannelId& id);

}  // namespace hrx::channel
