// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "hrx/mathdsp/rng.hpp"
#include "hrx/nn/checkpoint.hpp"
#include "hrx/nn/ops.hpp"
#include "hrx/nn/params.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::neural {

struct NeuralRxConfig {
    int num_res_blocks = 2;
    int filters = 32;
    int kernel = 3;
    bool noise_plane = true;
    // >0 turns the network into the enhancer: traditional LLRs enter as extra
    // input channels (one per bit of the symbol)
    int llr_channels = 0;
    // per antenna re/im of the interpolated LS channel estimate and of the
    // matched-filter product conj(h_ls) * y
    bool ls_features = false;
    double bn_momentum = 0.99;
    double bn_epsilon = 1e-5;

    static NeuralRxConfig paper_scale() { return {4, 128, 3, true, 0, false, 0.99, 1e-5}; }

    void validate() const;
    int input_channels(const phy::FrameConfig& frame) const;
    /// Fingerprint of the architecture and frame layout, stored in checkpoints.
    std::string hash(const phy::FrameConfig& frame) const;
};

inline constexpr const char* kNeuralRxKind = "neural_rx";
inline constexpr const char* kEnhancerKind = "neural_enhancer";

/// Channels-last features [1, symbols, subcarriers, C]:
/// per antenna re/im of the received grid, scaled by one factor per grid so
/// their mean power is 1; re/im of the pilot template (zero on data REs);
/// log10(noise_var) as a constant plane; optional LLR channels.
nn::Tensor featurize(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var,
                     const NeuralRxConfig& config = {}, const phy::LlrGrid* llrs = nullptr);

/// Writes the same features into a preallocated buffer of one sample.
void featurize_into(std::span<nn::Real> out, const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame,
                    double noise_var, const NeuralRxConfig& config, const phy::LlrGrid* llrs);

/// He-initialised hidden convolutions, zero output layer.
nn::LayerParams init_neural_rx(const NeuralRxConfig& config, const phy::FrameConfig& frame, RngStream& rng);

/// Bit-1 logits per RE and bit, [B, symbols, subcarriers, bits_per_symbol].
/// Train mode updates the batch-norm running statistics stored in params.
nn::Tensor neural_logits(nn::LayerParams& params, const NeuralRxConfig& config, const nn::Tensor& features,
                         nn::BatchNormMode mode);

/// Flat indices of the data-RE logits of sample b within a logits tensor, in
/// LLR order.
std::vector<std::uint32_t> data_logit_indices(const phy::FrameConfig& frame, int batch);

/// Inference: LLR = -logit on every data RE. Thread-safe for shared params.
phy::LlrGrid neural_forward(const nn::LayerParams& params, const NeuralRxConfig& config,
                            const phy::FrameConfig& frame, const nn::Tensor& features);

/// Convenience: featurize + neural_forward.
phy::LlrGrid neural_receive(const nn::LayerParams& params, const NeuralRxConfig& config,
                            const phy::FrameConfig& frame, const phy::ResourceGrid& rx_grid, double noise_var,
                            const phy::LlrGrid* llrs = nullptr);

nn::Checkpoint make_neural_checkpoint(const nn::LayerParams& params, const NeuralRxConfig& config,
                                      const phy::FrameConfig& frame);
/// Throws LoadError when the checkpoint kind or architecture hash does not match.
nn::LayerParams load_neural_checkpoint(const std::string& path, const NeuralRxConfig& config,
                                       const phy::FrameConfig& frame, const std::string& kind = kNeuralRxKind);

}  // namespace hrx::neural
