// SPDX-License-Identifier: Apache-2.0
#include "hrx/neural/model.hpp"

#include <cmath>

#include "hrx/errors.hpp"
#include "hrx/hash.hpp"
#include "hrx/rx/traditional.hpp"

namespace hrx::neural {

namespace {

std::string block_name(int i) { return "block" + std::to_string(i); }

void add_conv(nn::LayerParams& p, const std::string& name, int k, int cin, int cout, RngStream& rng, bool zero) {
    nn::Tensor w = zero ? nn::Tensor({k, k, cin, cout}, nn::Real(0), true) : nn::he_normal({k, k, cin, cout}, k * k * cin, rng);
    w.set_requires_grad(true);
    p.add(name + ".kernel", w);
    p.add(name + ".bias", nn::Tensor({cout}, nn::Real(0), true));
}

nn::Tensor conv(nn::LayerParams& p, const std::string& name, const nn::Tensor& x) {
    return nn::conv2d(x, p.at(name + ".kernel"), p.at(name + ".bias"));
}

}  // namespace

void NeuralRxConfig::validate() const {
    if (num_res_blocks < 0 || filters <= 0 || kernel <= 0 || kernel % 2 == 0 || llr_channels < 0)
        throw ConfigError("neural receiver: block count, filters and odd kernel size must be positive");
}

int NeuralRxConfig::input_channels(const phy::FrameConfig& frame) const {
    return 2 * frame.num_rx_antennas + 2 + (noise_plane ? 1 : 0) + llr_channels + (ls_features ? 4 * frame.num_rx_antennas : 0);
}

std::string NeuralRxConfig::hash(const phy::FrameConfig& frame) const {
    const std::string desc = "blocks=" + std::to_string(num_res_blocks) + ";filters=" + std::to_string(filters) +
                             ";kernel=" + std::to_string(kernel) + ";noise_plane=" + std::to_string(noise_plane) +
                             ";llr=" + std::to_string(llr_channels) + ";ls=" + std::to_string(ls_features) + ";in=" + std::to_string(input_channels(frame)) +
                             ";out=" + std::to_string(frame.bits_per_symbol()) + ";" + frame.summary();
    return hex64(fnv1a64(desc));
}

void featurize_into(std::span<nn::Real> out, const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame,
                    double noise_var, const NeuralRxConfig& config, const phy::LlrGrid* llrs) {
    const int n_ant = rx_grid.antennas(), n_sym = rx_grid.symbols(), n_sc = rx_grid.subcarriers();
    if (n_ant != frame.num_rx_antennas || n_sym != frame.num_ofdm_symbols || n_sc != frame.num_subcarriers)
        throw ValidationError("received grid does not match the frame layout");
    const int c = config.input_channels(frame);
    if (out.size() != static_cast<std::size_t>(n_sym) * n_sc * c) throw ValidationError("feature buffer has the wrong size");
    if (config.llr_channels > 0) {
        if (!llrs) throw ValidationError("enhancer features need traditional LLRs");
        if (config.llr_channels != frame.bits_per_symbol() || llrs->llr.size() != static_cast<std::size_t>(frame.data_bits()))
            throw ValidationError("LLR grid does not match the frame");
    }

    double power = 0;
    for (const auto& v : rx_grid.samples()) power += std::norm(v);
    power /= static_cast<double>(rx_grid.samples().size());
    const double scale = power > 0 ? 1.0 / std::sqrt(power) : 1.0;
    const auto pilots = phy::pilot_sequence(frame);
    const double nv_plane = std::log10(std::max(noise_var, 1e-10));
    phy::ResourceGrid h_ls;
    if (config.ls_features) h_ls = rx::interpolate(rx::ls_estimate(rx_grid, pilots, frame), frame).est;

    std::fill(out.begin(), out.end(), nn::Real(0));
    std::size_t llr_pos = 0;
    for (int t = 0; t < n_sym; ++t) {
        const bool pilot = frame.is_pilot_symbol(t);
        for (int k = 0; k < n_sc; ++k) {
            nn::Real* px = out.data() + (static_cast<std::size_t>(t) * n_sc + k) * c;
            int ch = 0;
            for (int a = 0; a < n_ant; ++a) {
                const cplx y = rx_grid.at(a, t, k) * scale;
                px[ch++] = static_cast<nn::Real>(y.real());
                px[ch++] = static_cast<nn::Real>(y.imag());
            }
            if (pilot) {
                px[ch] = static_cast<nn::Real>(pilots[static_cast<std::size_t>(k)].real());
                px[ch + 1] = static_cast<nn::Real>(pilots[static_cast<std::size_t>(k)].imag());
            }
            ch += 2;
            if (config.noise_plane) px[ch++] = static_cast<nn::Real>(nv_plane);
            if (config.llr_channels > 0 && !pilot) {
                for (int j = 0; j < config.llr_channels; ++j)
                    px[ch + j] = static_cast<nn::Real>(std::clamp(llrs->llr[llr_pos++], -20.0, 20.0) / 10.0);
            }
            ch += config.llr_channels;
            if (config.ls_features) {
                for (int a = 0; a < n_ant; ++a) {
                    const cplx h = h_ls.at(a, t, k) * scale;
                    const cplx m = std::conj(h) * rx_grid.at(a, t, k) * scale;
                    px[ch++] = static_cast<nn::Real>(h.real());
                    px[ch++] = static_cast<nn::Real>(h.imag());
                    px[ch++] = static_cast<nn::Real>(m.real());
                    px[ch++] = static_cast<nn::Real>(m.imag());
                }
            }
        }
    }
}

nn::Tensor featurize(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var,
                     const NeuralRxConfig& config, const phy::LlrGrid* llrs) {
    nn::Tensor t({1, frame.num_ofdm_symbols, frame.num_subcarriers, config.input_channels(frame)});
    featurize_into(t.data(), rx_grid, frame, noise_var, config, llrs);
    return t;
}

nn::LayerParams init_neural_rx(const NeuralRxConfig& config, const phy::FrameConfig& frame, RngStream& rng) {
    config.validate();
    nn::LayerParams p;
    const int f = config.filters, k = config.kernel;
    add_conv(p, "in", k, config.input_channels(frame), f, rng, false);
    for (int i = 0; i < config.num_res_blocks; ++i) {
        const auto b = block_name(i);
        p.add_batch_norm(b + ".bn1", f);
        add_conv(p, b + ".conv1", k, f, f, rng, false);
        p.add_batch_norm(b + ".bn2", f);
        add_conv(p, b + ".conv2", k, f, f, rng, false);
    }
    add_conv(p, "out", k, f, frame.bits_per_symbol(), rng, true);
    return p;
}

nn::Tensor neural_logits(nn::LayerParams& params, const NeuralRxConfig& config, const nn::Tensor& features,
                         nn::BatchNormMode mode) {
    const auto mom = static_cast<nn::Real>(config.bn_momentum);
    const auto eps = static_cast<nn::Real>(config.bn_epsilon);
    nn::Tensor x = conv(params, "in", features);
    for (int i = 0; i < config.num_res_blocks; ++i) {
        const auto b = block_name(i);
        auto bn1 = params.batch_norm(b + ".bn1", mom, eps);
        auto bn2 = params.batch_norm(b + ".bn2", mom, eps);
        nn::Tensor h = conv(params, b + ".conv1", nn::relu(nn::batch_norm(x, bn1, mode)));
        h = conv(params, b + ".conv2", nn::relu(nn::batch_norm(h, bn2, mode)));
        x = nn::add(x, h);
    }
    return conv(params, "out", x);
}

std::vector<std::uint32_t> data_logit_indices(const phy::FrameConfig& frame, int batch) {
    const int bps = frame.bits_per_symbol();
    std::vector<std::uint32_t> idx;
    idx.reserve(static_cast<std::size_t>(frame.data_bits()));
    for (int t : frame.data_symbols())
        for (int k = 0; k < frame.num_subcarriers; ++k)
            for (int j = 0; j < bps; ++j)
                idx.push_back(static_cast<std::uint32_t>(
                    ((static_cast<std::size_t>(batch) * frame.num_ofdm_symbols + t) * frame.num_subcarriers + k) * bps + j));
    return idx;
}

phy::LlrGrid neural_forward(const nn::LayerParams& params, const NeuralRxConfig& config,
                            const phy::FrameConfig& frame, const nn::Tensor& features) {
    if (features.rank() != 4 || features.dim(0) != 1 || features.dim(3) != config.input_channels(frame))
        throw ShapeError("neural_forward: features must be [1, symbols, subcarriers, " +
                         std::to_string(config.input_channels(frame)) + "], got " + nn::shape_string(features.shape()));
    nn::NoGradGuard no_grad;
    nn::LayerParams view = params;  // shares storage; eval mode leaves it untouched
    const nn::Tensor logits = neural_logits(view, config, features, nn::BatchNormMode::Eval);
    if (logits.dim(3) != frame.bits_per_symbol()) throw LoadError("neural receiver output does not match the modulation");
    phy::LlrGrid out;
    const auto idx = data_logit_indices(frame, 0);
    out.llr.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out.llr[i] = -static_cast<double>(logits[idx[i]]);
    return out;
}

phy::LlrGrid neural_receive(const nn::LayerParams& params, const NeuralRxConfig& config,
                            const phy::FrameConfig& frame, const phy::ResourceGrid& rx_grid, double noise_var,
                            const phy::LlrGrid* llrs) {
    return neural_forward(params, config, frame, featurize(rx_grid, frame, noise_var, config, llrs));
}

nn::Checkpoint make_neural_checkpoint(const nn::LayerParams& params, const NeuralRxConfig& config,
                                      const phy::FrameConfig& frame) {
    return {config.llr_channels > 0 ? kEnhancerKind : kNeuralRxKind, config.hash(frame), params};
}

nn::LayerParams load_neural_checkpoint(const std::string& path, const NeuralRxConfig& config,
                                       const phy::FrameConfig& frame, const std::string& kind) {
    auto ckpt = nn::load_checkpoint(path);
    if (ckpt.kind != kind) throw LoadError(path + ": expected a " + kind + " checkpoint, found " + ckpt.kind);
    if (ckpt.config_hash != config.hash(frame))
        throw LoadError(path + ": checkpoint was trained for a different architecture or frame layout");
    return std::move(ckpt.params);
}

}  // namespace hrx::neural
