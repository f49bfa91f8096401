// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "hrx/channel/profile.hpp"
#include "hrx/mathdsp/rng.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::channel {

/// One TTI of fading: tap gains per (antenna, symbol) and the resulting
/// frequency response.
struct ChannelRealization {
    phy::ResourceGrid freq_response;  // [antenna][symbol][subcarrier]
    std::vector<double> tap_delays;   // seconds, as used by freq_response
    std::vector<cplx> tap_gains;      // [antenna][symbol][tap]
    int profile_index = 0;
    bool time_domain = false;  // apply() convolves in time instead of multiplying per RE

    int num_taps() const { return static_cast<int>(tap_delays.size()); }
    const cplx& gain(int a, int t, int l) const {
        return tap_gains[(static_cast<std::size_t>(a) * freq_response.symbols() + t) * tap_delays.size() + l];
    }
};

/// Noise power per RE for an SNR in dB; +inf disables noise.
double noise_variance(double snr_db);

/// Samples tap gains and synthesises H. Anomalous profiles get delays rounded to
/// whole samples and are marked for time-domain application. Throws ConfigError
/// if an in-family profile has a tap beyond the cyclic prefix.
ChannelRealization realize(const ChannelProfile& profile, const phy::FrameConfig& config, RngStream& rng);

/// Received grid for a single-port transmit grid. Per-RE Y = H X + W, or the
/// time-domain convolution path when the realization asks for it; W has
/// variance noise_variance(snr_db) per RE and antenna.
phy::ResourceGrid apply(const phy::ResourceGrid& tx_grid, const ChannelRealization& h, double snr_db,
                        const phy::FrameConfig& config, RngStream& rng);

/// Time-domain reference path. Tap delays are rounded to whole samples, so it
/// matches the per-RE path exactly only for integer-sample delays.
phy::ResourceGrid apply_time_domain(const phy::ResourceGrid& tx_grid, const ChannelRealization& h,
                                    const phy::FrameConfig& config);

}  // namespace hrx::channel
