// SPDX-License-Identifier: Apache-2.0
#include "hrx/decider/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "hrx/errors.hpp"
#include "hrx/hash.hpp"

namespace hrx::decider {

namespace {

const char* const kConv[] = {"conv1", "conv2", "conv3"};
const char* const kBn[] = {"bn1", "bn2", "bn3"};

// Data symbol whose LLR row is attached to pilot symbol t.
int nearest_data_symbol(const phy::FrameConfig& frame, int t) {
    const auto ds = frame.data_symbols();
    int best = ds.front();
    for (int d : ds)
        if (std::abs(d - t) < std::abs(best - t)) best = d;
    return best;
}

}  // namespace

void DiscConfig::validate() const {
    for (int f : filters)
        if (f <= 0) throw ConfigError("discriminator: filter counts must be positive");
    if (kernel <= 0 || kernel % 2 == 0 || dense_units <= 0 || llr_channels < 0)
        throw ConfigError("discriminator: kernel must be odd and dense units positive");
}

int DiscConfig::input_channels(const phy::FrameConfig& frame) const {
    return 2 * frame.num_rx_antennas + llr_channels;
}

std::string DiscConfig::hash(const phy::FrameConfig& frame) const {
    const std::string desc = "filters=" + std::to_string(filters[0]) + "/" + std::to_string(filters[1]) + "/" +
                             std::to_string(filters[2]) + ";kernel=" + std::to_string(kernel) +
                             ";dense=" + std::to_string(dense_units) + ";llr=" + std::to_string(llr_channels) + ";" +
                             frame.summary();
    return hex64(fnv1a64(desc));
}

nn::Tensor disc_featurize(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, const DiscConfig& config,
                          const phy::LlrGrid* llrs) {
    const int n_ant = rx_grid.antennas(), n_sc = rx_grid.subcarriers();
    if (n_ant != frame.num_rx_antennas || rx_grid.symbols() != frame.num_ofdm_symbols || n_sc != frame.num_subcarriers)
        throw ValidationError("received grid does not match the frame layout");
    const int bps = frame.bits_per_symbol();
    if (config.llr_channels > 0) {
        if (!llrs) throw ValidationError("discriminator features need an LLR grid");
        if (config.llr_channels != bps || llrs->llr.size() != static_cast<std::size_t>(frame.data_bits()))
            throw ValidationError("LLR grid does not match the frame");
    }
    const int np = static_cast<int>(frame.pilot_symbols.size());
    const int c = config.input_channels(frame);

    double power = 0;
    for (int t : frame.pilot_symbols)
        for (int a = 0; a < n_ant; ++a)
            for (int k = 0; k < n_sc; ++k) power += std::norm(rx_grid.at(a, t, k));
    power /= static_cast<double>(np) * n_ant * n_sc;
    const double scale = power > 0 ? 1.0 / std::sqrt(power) : 1.0;

    const auto ds = frame.data_symbols();
    nn::Tensor out({1, np, n_sc, c});
    for (int i = 0; i < np; ++i) {
        const int t = frame.pilot_symbols[static_cast<std::size_t>(i)];
        std::size_t llr_row = 0;
        if (config.llr_channels > 0) {
            const int d = nearest_data_symbol(frame, t);
            llr_row = static_cast<std::size_t>(std::find(ds.begin(), ds.end(), d) - ds.begin());
        }
        for (int k = 0; k < n_sc; ++k) {
            nn::Real* px = out.data().data() + (static_cast<std::size_t>(i) * n_sc + k) * c;
            int ch = 0;
            for (int a = 0; a < n_ant; ++a) {
                const cplx y = rx_grid.at(a, t, k) * scale;
                px[ch++] = static_cast<nn::Real>(y.real());
                px[ch++] = static_cast<nn::Real>(y.imag());
            }
            for (int j = 0; j < config.llr_channels; ++j) {
                const double l = llrs->llr[(llr_row * n_sc + k) * bps + j];
                px[ch++] = static_cast<nn::Real>(std::clamp(l, -20.0, 20.0) / 10.0);
            }
        }
    }
    return out;
}

nn::LayerParams init_discriminator(const DiscConfig& config, const phy::FrameConfig& frame, RngStream& rng) {
    config.validate();
    nn::LayerParams p;
    int cin = config.input_channels(frame);
    const int k = config.kernel;
    for (int i = 0; i < 3; ++i) {
        const int cout = config.filters[static_cast<std::size_t>(i)];
        auto w = nn::he_normal({k, k, cin, cout}, k * k * cin, rng);
        w.set_requires_grad(true);
        p.add(std::string(kConv[i]) + ".kernel", w);
        p.add(std::string(kConv[i]) + ".bias", nn::Tensor({cout}, nn::Real(0), true));
        p.add_batch_norm(kBn[i], cout);
        cin = cout;
    }
    const int flat = static_cast<int>(frame.pilot_symbols.size()) * frame.num_subcarriers * cin;
    auto w1 = nn::he_normal({flat, config.dense_units}, flat, rng);
    w1.set_requires_grad(true);
    p.add("dense1.weight", w1);
    p.add("dense1.bias", nn::Tensor({config.dense_units}, nn::Real(0), true));
    p.add("dense2.weight", nn::Tensor({config.dense_units, 1}, nn::Real(0), true));
    p.add("dense2.bias", nn::Tensor({1}, nn::Real(0), true));
    return p;
}

nn::Tensor disc_logits(nn::LayerParams& params, const DiscConfig& config, const nn::Tensor& features,
                       nn::BatchNormMode mode) {
    const auto mom = static_cast<nn::Real>(config.bn_momentum);
    const auto eps = static_cast<nn::Real>(config.bn_epsilon);
    nn::Tensor x = features;
    for (int i = 0; i < 3; ++i) {
        auto bn = params.batch_norm(kBn[i], mom, eps);
        x = nn::conv2d(x, params.at(std::string(kConv[i]) + ".kernel"), params.at(std::string(kConv[i]) + ".bias"));
        x = nn::batch_norm(nn::relu(x), bn, mode);
    }
    x = nn::relu(nn::dense(nn::flatten(x), params.at("dense1.weight"), params.at("dense1.bias")));
    return nn::dense(x, params.at("dense2.weight"), params.at("dense2.bias"));
}

double disc_u(const nn::LayerParams& params, const DiscConfig& config, const nn::Tensor& features) {
    if (features.rank() != 4 || features.dim(0) != 1) throw ShapeError("disc_u: expected one [1,P,K,C] sample, got " + nn::shape_string(features.shape()));
    nn::NoGradGuard no_grad;
    nn::LayerParams view = params;
    const double logit = disc_logits(view, config, features, nn::BatchNormMode::Eval).item();
    return 1.0 / (1.0 + std::exp(-logit));
}

nn::Checkpoint make_disc_checkpoint(const nn::LayerParams& params, const DiscConfig& config,
                                    const phy::FrameConfig& frame) {
    return {kDiscriminatorKind, config.hash(frame), params};
}

nn::LayerParams load_disc_checkpoint(const std::string& path, const DiscConfig& config, const phy::FrameConfig& frame) {
    auto ckpt = nn::load_checkpoint(path);
    if (ckpt.kind != kDiscriminatorKind) throw LoadError(path + ": expected a discriminator checkpoint, found " + ckpt.kind);
    if (ckpt.config_hash != config.hash(frame))
        throw LoadError(path + ": discriminator checkpoint was trained for a different input layout");
    return std::move(ckpt.params);
}

}  // namespace hrx::decider
