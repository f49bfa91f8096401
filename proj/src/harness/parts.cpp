// SPDX-License-Identifier: Apache-2.0
#include "hrx/harness/parts.hpp"

#include "hrx/errors.hpp"
#include "hrx/harness/settings.hpp"

namespace hrx::harness {

LoadedParts load_parts(const Config& c, const phy::FrameConfig& frame, decider::Arch arch, bool paper_scale) {
    LoadedParts p;
    if (c.has("neural.checkpoint")) {
        const auto cfg = neural_from(c, paper_scale);
        p.neural = std::make_unique<decider::NeuralReceiver>(
            neural::load_neural_checkpoint(c.get_string("neural.checkpoint", ""), cfg, frame), cfg);
    }
    if (c.has("enhancer.checkpoint")) {
        const auto cfg = enhancer_from(c, frame, paper_scale);
        p.enhancer = std::make_unique<decider::NeuralEnhancer>(
            neural::load_neural_checkpoint(c.get_string("enhancer.checkpoint", ""), cfg, frame, neural::kEnhancerKind),
            cfg);
    }
    if (c.has("disc.checkpoint")) {
        const auto cfg = disc_from(c, frame, arch);
        p.disc = std::make_unique<decider::NetDiscriminator>(
            decider::load_disc_checkpoint(c.get_string("disc.checkpoint", ""), cfg, frame), cfg);
    }
    return p;
}

decider::DiscConfig disc_config_for(const decider::DiscDataset& ds, const phy::FrameConfig& frame) {
    decider::DiscConfig cfg;
    if (ds.feature_shape.size() != 3) throw ValidationError("dataset features must be [pilots, K, C]");
    cfg.llr_channels = ds.feature_shape[2] - 2 * frame.num_rx_antennas;
    if (cfg.llr_channels != 0 && cfg.llr_channels != frame.bits_per_symbol())
        throw ValidationError("dataset feature channels do not match the frame");
    return cfg;
}

}  // namespace hrx::harness
