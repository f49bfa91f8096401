// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "hrx/channel/profile.hpp"
#include "hrx/decider/hybrid.hpp"
#include "hrx/nn/params.hpp"

namespace hrx::decider {

struct DiscMeta {
    channel::ChannelId channel;
    double snr_db = 0.0;
    std::uint32_t neural_errors = 0;  // enhancer errors under Arch II
    std::uint32_t trad_errors = 0;
};

struct DiscSample {
    std::vector<nn::Real> features;  // [pilots, K, C]
    std::uint8_t label = 0;
    DiscMeta meta;
};

struct DiscDataset {
    nn::Shape feature_shape;
    std::vector<DiscSample> samples;

    std::uint64_t hash() const;
    std::size_t positives() const;
};

/// Runs the traditional receiver and the neural side for `arch` on one grid,
/// counts uncoded errors against the truth and labels by the selection rule.
DiscSample label_sample(const phy::ResourceGrid& rx_grid, std::span<const std::uint8_t> truth, Arch arch,
                        const HybridParts& parts, const DiscConfig& config, const phy::FrameConfig& frame,
                        double noise_var);

struct DiscRecipe {
    std::vector<channel::ChannelId> in_family{{0}, {1}, {7}};
    channel::ChannelId anomaly{4, 5.0};
    double anomaly_fraction = 0.15;
    double snr_lo_db = 0.0;
    double snr_hi_db = 20.0;
    int count = 2000;
    std::uint64_t seed = 2;
    Arch arch = Arch::I;

    void validate() const;
};

/// Per-sample streams split from the seed, so the result does not depend on
/// `threads`. The parts must be safe to call concurrently (the stock ones are).
DiscDataset build_disc_dataset(const DiscRecipe& recipe, const HybridParts& parts, const DiscConfig& config,
                               const phy::FrameConfig& frame, int threads = 1);

/// "HRXD", version byte 1, u32 sample count, then per sample: u32 rank, u32
/// dims, f32 features, u8 label, i32 channel index, f64 severity, f64 snr,
/// u32 neural errors, u32 traditional errors. All little-endian.
void save_disc_dataset(const std::filesystem::path& path, const DiscDataset& ds);
/// Throws LoadError on bad magic, version or truncation.
DiscDataset load_disc_dataset(const std::filesystem::path& path);

struct DiscTrainConfig {
    int epochs = 20;
    int batch_size = 32;
    nn::AdamConfig adam{};
    double holdout_fraction = 0.2;
    bool class_weight = false;  // weight each class by the inverse of its frequency
    std::uint64_t seed = 3;
};

struct DiscEpochLog {
    int epoch = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double wall_ms = 0.0;
    double train_accuracy = 0.0;
    double holdout_accuracy = 0.0;
};

struct DiscTrainResult {
    nn::LayerParams params;
    std::vector<DiscEpochLog> log;
    std::vector<std::size_t> holdout;  // sample indices held out
};

/// Adam + BCE on the pre-sigmoid output. Throws ValidationError when only one
/// label is present, DivergenceError on a non-finite loss.
DiscTrainResult train_discriminator(const DiscDataset& ds, const DiscConfig& config, const phy::FrameConfig& frame,
                                    const DiscTrainConfig& train,
                                    const std::function<void(const DiscEpochLog&)>& on_epoch = {});

/// u for every sample (batched eval-mode inference).
std::vector<double> disc_outputs(const nn::LayerParams& params, const DiscConfig& config, const DiscDataset& ds,
                                 std::span<const std::size_t> indices = {});

}  // namespace hrx::decider
