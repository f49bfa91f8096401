// SPDX-License-Identifier: Apache-2.0
#include "hrx/neural/train.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "hrx/channel/fading.hpp"
#include "hrx/errors.hpp"
#include "hrx/hash.hpp"
#include "hrx/parallel.hpp"
#include "hrx/phy/ofdm.hpp"
#include "hrx/rx/traditional.hpp"

namespace hrx::neural {

namespace {

constexpr std::uint64_t kDatasetStream = 0x6E65757261ull;  // per-sample streams are split from this
constexpr std::uint64_t kShuffleStream = 0x73687566ull;
constexpr std::uint64_t kInitStream = 0x696E6974ull;

}  // namespace

void TrainRecipe::validate() const {
    if (channels.empty()) throw ConfigError("train recipe: no channel indices");
    if (!(snr_lo_db <= snr_hi_db) || !std::isfinite(snr_lo_db) || !std::isfinite(snr_hi_db))
        throw ConfigError("train recipe: SNR range must be finite and non-empty");
    if (num_samples < 2) throw ConfigError("train recipe: need at least two samples");
    if (batch_size < 2) throw ConfigError("train recipe: batch size must be >= 2");
    if (epochs < 1) throw ConfigError("train recipe: epochs must be >= 1");
    if (!(adam.lr > 0)) throw ConfigError("train recipe: learning rate must be positive");
}

std::uint64_t Dataset::hash() const {
    std::uint64_t h = fnv1a64(nn::shape_string(feature_shape));
    for (const auto& s : samples) {
        h = fnv1a64(std::span(reinterpret_cast<const unsigned char*>(s.features.data()), s.features.size() * sizeof(nn::Real)), h);
        h = fnv1a64(std::span(s.bits.data(), s.bits.size()), h);
        h = fnv1a64(s.channel.str(), h);
        h = fnv1a64(std::span(reinterpret_cast<const unsigned char*>(&s.snr_db), sizeof s.snr_db), h);
    }
    return h;
}

Dataset gen_dataset(const TrainRecipe& recipe, const phy::FrameConfig& frame, const NeuralRxConfig& config,
                    int threads) {
    recipe.validate();
    frame.validate();
    config.validate();
    const phy::LdpcCode code(phy::code_params_for(frame));
    Dataset ds;
    ds.feature_shape = {frame.num_ofdm_symbols, frame.num_subcarriers, config.input_channels(frame)};
    ds.samples.resize(static_cast<std::size_t>(recipe.num_samples));
    const RngStream base(recipe.seed, kDatasetStream);
    parallel_for(ds.samples.size(), threads, [&](std::size_t i) {
        RngStream rng = split_stream(base, i);
        Sample& s = ds.samples[i];
        s.channel = recipe.channels[rng.below(recipe.channels.size())];
        s.snr_db = rng.uniform(recipe.snr_lo_db, recipe.snr_hi_db);
        const auto tx = phy::make_transmission(code, frame, rng);
        const auto h = channel::realize(channel::profile_for(s.channel), frame, rng);
        const auto rx = channel::apply(tx.frame.grid, h, s.snr_db, frame, rng);
        const double nv = channel::noise_variance(s.snr_db);
        phy::LlrGrid llrs;
        if (config.llr_channels > 0) llrs = rx::traditional_receive(rx, frame, nv);
        s.features.resize(nn::shape_size(ds.feature_shape));
        featurize_into(s.features, rx, frame, nv, config, config.llr_channels > 0 ? &llrs : nullptr);
        s.bits = tx.frame.bits;
    });
    return ds;
}

TrainResult train_neural_rx(const Dataset& data, const NeuralRxConfig& config, const phy::FrameConfig& frame,
                            const TrainRecipe& recipe, const EpochCallback& on_epoch) {
    RngStream rng(recipe.seed, kInitStream);
    return train_neural_rx(data, init_neural_rx(config, frame, rng), config, frame, recipe, on_epoch);
}

TrainResult train_neural_rx(const Dataset& data, nn::LayerParams params, const NeuralRxConfig& config,
                            const phy::FrameConfig& frame, const TrainRecipe& recipe, const EpochCallback& on_epoch) {
    recipe.validate();
    if (data.samples.size() < 2) throw ValidationError("training needs at least two samples");
    const nn::Shape want{frame.num_ofdm_symbols, frame.num_subcarriers, config.input_channels(frame)};
    if (data.feature_shape != want)
        throw ValidationError("dataset features " + nn::shape_string(data.feature_shape) + " do not match the model input " +
                              nn::shape_string(want));

    const std::size_t n = data.samples.size();
    const std::size_t per_sample = nn::shape_size(want);
    const std::size_t bits_per = static_cast<std::size_t>(frame.data_bits());
    const int max_b = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(recipe.batch_size), n));
    std::vector<std::uint32_t> all_idx;
    for (int b = 0; b < max_b; ++b) {
        const auto idx = data_logit_indices(frame, b);
        all_idx.insert(all_idx.end(), idx.begin(), idx.end());
    }

    auto make_batch = [&](const std::vector<std::size_t>& order, std::size_t start, int b, nn::Tensor& x, nn::Tensor& y) {
        x = nn::Tensor({b, want[0], want[1], want[2]});
        y = nn::Tensor({static_cast<int>(b * bits_per)});
        for (int j = 0; j < b; ++j) {
            const Sample& s = data.samples[order[start + static_cast<std::size_t>(j)]];
            if (s.features.size() != per_sample || s.bits.size() != bits_per) throw ValidationError("malformed training sample");
            std::memcpy(x.data().data() + j * per_sample, s.features.data(), per_sample * sizeof(nn::Real));
            for (std::size_t i = 0; i < bits_per; ++i) y[j * bits_per + i] = s.bits[i];
        }
    };

    TrainResult result;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    {
        nn::Tensor x, y;
        make_batch(order, 0, max_b, x, y);
        nn::NoGradGuard no_grad;
        const auto logits = neural_logits(params, config, x, nn::BatchNormMode::Eval);
        const auto sel = nn::gather(logits, std::span(all_idx.data(), static_cast<std::size_t>(max_b) * bits_per));
        result.log.push_back({0, static_cast<double>(nn::bce_with_logits(sel, y).item()), 0.0, 0.0});
        if (on_epoch) on_epoch(result.log.back());
    }

    nn::AdamState adam;
    adam.config = recipe.adam;
    RngStream shuffle(recipe.seed, kShuffleStream);
    const double lr0 = recipe.adam.lr;
    for (int epoch = 1; epoch <= recipe.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        if (recipe.lr_final > 0 && recipe.epochs > 1)
            adam.config.lr = lr0 * std::pow(recipe.lr_final / lr0, (epoch - 1) / static_cast<double>(recipe.epochs - 1));
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);

        double loss_sum = 0, gn_sum = 0;
        int steps = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(max_b)) {
            const int b = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_b), n - start));
            if (b < 2) continue;  // batch norm needs two samples
            nn::Tensor x, y;
            make_batch(order, start, b, x, y);
            const auto logits = neural_logits(params, config, x, nn::BatchNormMode::Train);
            const auto sel = nn::gather(logits, std::span(all_idx.data(), static_cast<std::size_t>(b) * bits_per));
            auto loss = nn::bce_with_logits(sel, y);
            const double lv = loss.item();
            if (!std::isfinite(lv))
                throw DivergenceError("neural receiver training diverged at epoch " + std::to_string(epoch) + ", step " +
                                      std::to_string(steps) + " (loss " + std::to_string(lv) + ")");
            params.zero_grad();
            loss.backward();
            const double gn = nn::grad_norm(params);
            nn::adam_step(params, adam);
            if (!params.all_finite())
                throw DivergenceError("neural receiver parameters became non-finite at epoch " + std::to_string(epoch));
            loss_sum += lv;
            gn_sum += gn;
            ++steps;
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back({epoch, loss_sum / std::max(steps, 1), gn_sum / std::max(steps, 1), ms});
        if (on_epoch) on_epoch(result.log.back());
    }
    params.zero_grad();
    result.params = std::move(params);
    return result;
}

std::string format_train_log(const std::vector<EpochLog>& log) {
    std::ostringstream os;
    os << "epoch,loss,grad_norm,wall_ms\n";
    os.precision(8);
    for (const auto& e : log) os << e.epoch << ',' << e.loss << ',' << e.grad_norm << ',' << e.wall_ms << '\n';
    return os.str();
}

}  // namespace hrx::neural
