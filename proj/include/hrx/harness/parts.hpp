// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "hrx/decider/dataset.hpp"
#include "hrx/harness/config.hpp"

namespace hrx::harness {

/// Owns the receivers behind a HybridParts view.
struct LoadedParts {
    std::unique_ptr<decider::TraditionalReceiver> traditional = std::make_unique<decider::TraditionalReceiver>();
    std::unique_ptr<decider::NeuralReceiver> neural;
    std::unique_ptr<decider::NeuralEnhancer> enhancer;
    std::unique_ptr<decider::NetDiscriminator> disc;

    decider::HybridParts view() const { return {traditional.get(), neural.get(), enhancer.get(), disc.get()}; }
};

/// Loads the checkpoints named by neural.checkpoint, enhancer.checkpoint and
/// disc.checkpoint, when present. The discriminator inputs follow `arch`.
/// Throws LoadError on a missing file or an architecture mismatch.
LoadedParts load_parts(const Config& c, const phy::FrameConfig& frame, decider::Arch arch, bool paper_scale);

/// Discriminator configuration matching a dataset's feature shape.
decider::DiscConfig disc_config_for(const decider::DiscDataset& ds, const phy::FrameConfig& frame);

}  // namespace hrx::harness
