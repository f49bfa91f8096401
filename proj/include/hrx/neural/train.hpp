// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hrx/channel/profile.hpp"
#include "hrx/neural/model.hpp"
#include "hrx/nn/params.hpp"

namespace hrx::neural {

struct TrainRecipe {
    std::vector<channel::ChannelId> channels{{0}, {1}, {7}};
    double snr_lo_db = 0.0;
    double snr_hi_db = 20.0;
    int num_samples = 4000;
    int batch_size = 16;
    int epochs = 10;
    std::uint64_t seed = 1;
    nn::AdamConfig adam{};
    double lr_final = 0.0;  // >0: learning rate decays geometrically to this by the last epoch

    void validate() const;
};

struct Sample {
    std::vector<nn::Real> features;    // [symbols, subcarriers, C]
    std::vector<std::uint8_t> bits;    // transmitted bits in LLR order
    channel::ChannelId channel;
    double snr_db = 0.0;
};

struct Dataset {
    nn::Shape feature_shape;  // [symbols, subcarriers, C]
    std::vector<Sample> samples;

    std::uint64_t hash() const;
};

/// Draws num_samples coded TTIs: channel uniform over the recipe list, SNR
/// uniform over the range. Sample i uses its own stream derived from the seed,
/// so the result does not depend on `threads`. LLR channels, when configured,
/// carry the traditional receiver's output.
Dataset gen_dataset(const TrainRecipe& recipe, const phy::FrameConfig& frame, const NeuralRxConfig& config,
                    int threads = 1);

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double wall_ms = 0.0;
};

struct TrainResult {
    nn::LayerParams params;
    std::vector<EpochLog> log;  // row 0 is the untrained loss on the first batch
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Adam on the mean BCE between the bit-1 logits at data REs and the
/// transmitted bits. Throws DivergenceError when the loss or a parameter stops
/// being finite.
TrainResult train_neural_rx(const Dataset& data, const NeuralRxConfig& config, const phy::FrameConfig& frame,
                            const TrainRecipe& recipe, const EpochCallback& on_epoch = {});

/// Same loop starting from given parameters.
TrainResult train_neural_rx(const Dataset& data, nn::LayerParams params, const NeuralRxConfig& config,
                            const phy::FrameConfig& frame, const TrainRecipe& recipe,
                            const EpochCallback& on_epoch = {});

std::string format_train_log(const std::vector<EpochLog>& log);

}  // namespace hrx::neural
