// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include "hrx/mathdsp/rng.hpp"
#include "hrx/nn/checkpoint.hpp"
#include "hrx/nn/ops.hpp"
#include "hrx/nn/params.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::decider {

/// Three conv layers (each followed by ReLU, then batch norm), flatten, dense
/// with ReLU, dense to one logit. u = sigmoid(logit).
struct DiscConfig {
    std::array<int, 3> filters{32, 64, 64};
    int kernel = 3;
    int dense_units = 30;
    // >0 appends LLR rows (Arch II / III inputs), one channel per bit
    int llr_channels = 0;
    double bn_momentum = 0.99;
    double bn_epsilon = 1e-5;

    void validate() const;
    int input_channels(const phy::FrameConfig& frame) const;
    std::string hash(const phy::FrameConfig& frame) const;
};

inline constexpr const char* kDiscriminatorKind = "discriminator";

/// Received pilot REs (raw, not divided by the pilots) as [1, pilots, K, 2N],
/// re/im per antenna, scaled to mean power 1. With llr_channels > 0 each pilot
/// row also carries the LLRs of the nearest data symbol (earlier one on ties),
/// clipped to +-20 and divided by 10.
nn::Tensor disc_featurize(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame,
                          const DiscConfig& config = {}, const phy::LlrGrid* llrs = nullptr);

nn::LayerParams init_discriminator(const DiscConfig& config, const phy::FrameConfig& frame, RngStream& rng);

/// Pre-sigmoid output, [B, 1].
nn::Tensor disc_logits(nn::LayerParams& params, const DiscConfig& config, const nn::Tensor& features,
                       nn::BatchNormMode mode);

/// Inference on one feature tensor. Thread-safe for shared params.
double disc_u(const nn::LayerParams& params, const DiscConfig& config, const nn::Tensor& features);

nn::Checkpoint make_disc_checkpoint(const nn::LayerParams& params, const DiscConfig& config,
                                    const phy::FrameConfig& frame);
nn::LayerParams load_disc_checkpoint(const std::string& path, const DiscConfig& config,
                                     const phy::FrameConfig& frame);

}  // namespace hrx::decider
