// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "hrx/phy/frame.hpp"

namespace hrx::rx {

enum class TimeInterpolation { Linear, Nearest };

struct ChannelEstimate {
    enum class Source { LsInterpolated, Perfect };
    phy::ResourceGrid est;  // [antenna][symbol][subcarrier]
    Source source = Source::LsInterpolated;
};

/// y / x at every pilot RE. Result has one "symbol" row per pilot symbol, in
/// the order of config.pilot_symbols.
phy::ResourceGrid ls_estimate(const phy::ResourceGrid& rx_grid, std::span<const cplx> pilots,
                              const phy::FrameConfig& config);

/// Fills every symbol from the pilot rows, per subcarrier. Linear mode is
/// piecewise linear between pilot symbols and affine outside them.
ChannelEstimate interpolate(const phy::ResourceGrid& pilot_estimates, const phy::FrameConfig& config,
                            TimeInterpolation mode = TimeInterpolation::Linear);

struct Equalized {
    cplx z;                // unbiased symbol estimate
    double eff_noise_var;  // noise variance of z
    bool erasure = false;  // channel norm below 1e-30; z and eff_noise_var are meaningless
};

/// Scalar LMMSE combining over N antennas, with the bias removed.
Equalized lmmse_equalize(std::span<const cplx> y, std::span<const cplx> h, double noise_var);

/// LMMSE + max-log demapping of every data RE given a channel estimate.
phy::LlrGrid equalize_and_demap(const phy::ResourceGrid& rx_grid, const phy::ResourceGrid& h,
                                const phy::FrameConfig& config, double noise_var);

/// LS estimation, time interpolation, LMMSE and demapping.
phy::LlrGrid traditional_receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& config, double noise_var,
                                 TimeInterpolation mode = TimeInterpolation::Linear);

/// Same chain with the true frequency response in place of the estimate.
phy::LlrGrid perfect_csi_receive(const phy::ResourceGrid& rx_grid, const phy::ResourceGrid& h_true,
                                 const phy::FrameConfig& config, double noise_var);

}  // namespace hrx::rx
