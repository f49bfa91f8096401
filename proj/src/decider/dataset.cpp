// SPDX-License-Identifier: Apache-2.0
#include "hrx/decider/dataset.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "hrx/channel/fading.hpp"
#include "hrx/errors.hpp"
#include "hrx/hash.hpp"
#include "hrx/parallel.hpp"
#include "hrx/phy/ofdm.hpp"

namespace hrx::decider {

namespace {

constexpr std::uint64_t kDiscStream = 0x64697363ull;
constexpr std::uint64_t kSplitStream = 0x73706C74ull;
constexpr std::uint64_t kInitStream = 0x696E6974ull;

static_assert(std::endian::native == std::endian::little, "HRXD I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw LoadError(path.string() + ": truncated dataset");
    return v;
}

nn::Tensor batch_features(const DiscDataset& ds, std::span<const std::size_t> idx) {
    const std::size_t per = nn::shape_size(ds.feature_shape);
    nn::Tensor x({static_cast<int>(idx.size()), ds.feature_shape[0], ds.feature_shape[1], ds.feature_shape[2]});
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto& f = ds.samples[idx[j]].features;
        if (f.size() != per) throw ValidationError("malformed discriminator sample");
        std::memcpy(x.data().data() + j * per, f.data(), per * sizeof(nn::Real));
    }
    return x;
}

double accuracy(const std::vector<double>& u, const DiscDataset& ds, std::span<const std::size_t> idx) {
    if (idx.empty()) return 0.0;
    std::size_t ok = 0;
    for (std::size_t j = 0; j < idx.size(); ++j) ok += (u[j] >= 0.5 ? 1 : 0) == ds.samples[idx[j]].label;
    return static_cast<double>(ok) / static_cast<double>(idx.size());
}

}  // namespace

std::uint64_t DiscDataset::hash() const {
    std::uint64_t h = fnv1a64(nn::shape_string(feature_shape));
    for (const auto& s : samples) {
        h = fnv1a64(std::span(reinterpret_cast<const unsigned char*>(s.features.data()), s.features.size() * sizeof(nn::Real)), h);
        const unsigned char rec[] = {s.label};
        h = fnv1a64(std::span(rec), h);
        h = fnv1a64(s.meta.channel.str() + ":" + std::to_string(s.meta.snr_db) + ":" + std::to_string(s.meta.neural_errors) +
                        ":" + std::to_string(s.meta.trad_errors),
                    h);
    }
    return h;
}

std::size_t DiscDataset::positives() const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.label;
    return n;
}

DiscSample label_sample(const phy::ResourceGrid& rx_grid, std::span<const std::uint8_t> truth, Arch arch,
                        const HybridParts& parts, const DiscConfig& config, const phy::FrameConfig& frame,
                        double noise_var) {
    if (!parts.traditional) throw LoadError("labeling needs the traditional receiver");
    const auto trad = parts.traditional->receive(rx_grid, frame, noise_var);
    phy::LlrGrid other;
    if (arch == Arch::II) {
        if (!parts.enhancer) throw LoadError("Arch II labeling needs the neural enhancer");
        other = parts.enhancer->enhance(rx_grid, frame, noise_var, trad);
    } else {
        if (!parts.neural) throw LoadError("labeling needs the neural receiver");
        other = parts.neural->receive(rx_grid, frame, noise_var);
    }
    DiscSample s;
    s.meta.trad_errors = static_cast<std::uint32_t>(phy::count_bit_errors(trad, truth));
    s.meta.neural_errors = static_cast<std::uint32_t>(phy::count_bit_errors(other, truth));
    s.label = static_cast<std::uint8_t>(selection_label(s.meta.neural_errors, s.meta.trad_errors));
    const phy::LlrGrid* extra = arch == Arch::I ? nullptr : arch == Arch::II ? &trad : &other;
    if ((config.llr_channels > 0) != (extra != nullptr))
        throw ConfigError("discriminator LLR channels must be set for Arch II/III and absent for Arch I");
    const auto f = disc_featurize(rx_grid, frame, config, extra);
    s.features.assign(f.data().begin(), f.data().end());
    return s;
}

void DiscRecipe::validate() const {
    if (in_family.empty()) throw ConfigError("discriminator recipe: no in-family channels");
    if (anomaly_fraction < 0 || anomaly_fraction > 1) throw ConfigError("discriminator recipe: anomaly_fraction must be in [0,1]");
    if (!(snr_lo_db <= snr_hi_db) || !std::isfinite(snr_lo_db) || !std::isfinite(snr_hi_db))
        throw ConfigError("discriminator recipe: SNR range must be finite and non-empty");
    if (count < 1) throw ConfigError("discriminator recipe: count must be positive");
}

DiscDataset build_disc_dataset(const DiscRecipe& recipe, const HybridParts& parts, const DiscConfig& config,
                               const phy::FrameConfig& frame, int threads) {
    recipe.validate();
    config.validate();
    const phy::LdpcCode code(phy::code_params_for(frame));
    DiscDataset ds;
    ds.feature_shape = {static_cast<int>(frame.pilot_symbols.size()), frame.num_subcarriers, config.input_channels(frame)};
    ds.samples.resize(static_cast<std::size_t>(recipe.count));
    const RngStream base(recipe.seed, kDiscStream);
    parallel_for(ds.samples.size(), threads, [&](std::size_t i) {
        RngStream rng = split_stream(base, i);
        const bool anomalous = rng.uniform() < recipe.anomaly_fraction;
        const auto id = anomalous ? recipe.anomaly : recipe.in_family[rng.below(recipe.in_family.size())];
        const double snr = rng.uniform(recipe.snr_lo_db, recipe.snr_hi_db);
        const auto tx = phy::make_transmission(code, frame, rng);
        const auto h = channel::realize(channel::profile_for(id), frame, rng);
        const auto rx = channel::apply(tx.frame.grid, h, snr, frame, rng);
        auto s = label_sample(rx, tx.frame.bits, recipe.arch, parts, config, frame, channel::noise_variance(snr));
        s.meta.channel = id;
        s.meta.snr_db = snr;
        ds.samples[i] = std::move(s);
    });
    return ds;
}

void save_disc_dataset(const std::filesystem::path& path, const DiscDataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw LoadError("cannot write " + path.string());
    os.write("HRXD", 4);
    put<std::uint8_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.samples.size()));
    for (const auto& s : ds.samples) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.feature_shape.size()));
        for (int d : ds.feature_shape) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
        for (nn::Real v : s.features) put<float>(os, static_cast<float>(v));
        put<std::uint8_t>(os, s.label);
        put<std::int32_t>(os, s.meta.channel.index);
        put<double>(os, s.meta.channel.severity);
        put<double>(os, s.meta.snr_db);
        put<std::uint32_t>(os, s.meta.neural_errors);
        put<std::uint32_t>(os, s.meta.trad_errors);
    }
    if (!os) throw LoadError("write failed for " + path.string());
}

DiscDataset load_disc_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw LoadError("cannot open dataset " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "HRXD", 4) != 0) throw LoadError(path.string() + ": not an HRXD file");
    if (get<std::uint8_t>(is, path) != 1) throw LoadError(path.string() + ": unsupported HRXD version");
    const auto n = get<std::uint32_t>(is, path);
    DiscDataset ds;
    ds.samples.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto rank = get<std::uint32_t>(is, path);
        if (rank == 0 || rank > 8) throw LoadError(path.string() + ": bad feature rank");
        nn::Shape shape;
        for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(static_cast<int>(get<std::uint32_t>(is, path)));
        if (i == 0) ds.feature_shape = shape;
        else if (shape != ds.feature_shape) throw LoadError(path.string() + ": inconsistent feature shapes");
        auto& s = ds.samples[i];
        s.features.resize(nn::shape_size(shape));
        for (auto& v : s.features) v = static_cast<nn::Real>(get<float>(is, path));
        s.label = get<std::uint8_t>(is, path);
        if (s.label > 1) throw LoadError(path.string() + ": label outside {0,1}");
        s.meta.channel.index = get<std::int32_t>(is, path);
        s.meta.channel.severity = get<double>(is, path);
        s.meta.snr_db = get<double>(is, path);
        s.meta.neural_errors = get<std::uint32_t>(is, path);
        s.meta.trad_errors = get<std::uint32_t>(is, path);
    }
    if (is.peek() != std::char_traits<char>::eof()) throw LoadError(path.string() + ": trailing bytes after the last sample");
    return ds;
}

std::vector<double> disc_outputs(const nn::LayerParams& params, const DiscConfig& config, const DiscDataset& ds,
                                 std::span<const std::size_t> indices) {
    std::vector<std::size_t> all;
    if (indices.empty()) {
        all.resize(ds.samples.size());
        std::iota(all.begin(), all.end(), 0);
        indices = all;
    }
    nn::NoGradGuard no_grad;
    nn::LayerParams view = params;
    std::vector<double> u;
    u.reserve(indices.size());
    constexpr std::size_t kChunk = 64;
    for (std::size_t s = 0; s < indices.size(); s += kChunk) {
        const auto part = indices.subspan(s, std::min(kChunk, indices.size() - s));
        const auto logits = disc_logits(view, config, batch_features(ds, part), nn::BatchNormMode::Eval);
        for (std::size_t j = 0; j < part.size(); ++j) u.push_back(1.0 / (1.0 + std::exp(-static_cast<double>(logits[j]))));
    }
    return u;
}

DiscTrainResult train_discriminator(const DiscDataset& ds, const DiscConfig& config, const phy::FrameConfig& frame,
                                    const DiscTrainConfig& train,
                                    const std::function<void(const DiscEpochLog&)>& on_epoch) {
    if (train.epochs < 1 || train.batch_size < 2) throw ConfigError("discriminator training: epochs >= 1 and batch >= 2 required");
    if (train.holdout_fraction < 0 || train.holdout_fraction >= 1) throw ConfigError("discriminator training: holdout_fraction must be in [0,1)");
    const nn::Shape want{static_cast<int>(frame.pilot_symbols.size()), frame.num_subcarriers, config.input_channels(frame)};
    if (ds.feature_shape != want)
        throw ValidationError("dataset features " + nn::shape_string(ds.feature_shape) + " do not match the discriminator input " +
                              nn::shape_string(want));
    const std::size_t pos = ds.positives();
    if (pos == 0 || pos == ds.samples.size())
        throw ValidationError("discriminator training needs both labels; dataset has " + std::to_string(pos) + " of " +
                              std::to_string(ds.samples.size()) + " labeled 1");

    std::vector<std::size_t> order(ds.samples.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(train.seed, kSplitStream);
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    const auto n_hold = static_cast<std::size_t>(std::floor(train.holdout_fraction * static_cast<double>(order.size())));
    DiscTrainResult result;
    result.holdout.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_hold));
    std::vector<std::size_t> fit(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());
    if (fit.size() < 2) throw ValidationError("discriminator training: too few samples after the holdout split");

    std::size_t fit_pos = 0;
    for (auto i : fit) fit_pos += ds.samples[i].label;
    const double w1 = train.class_weight && fit_pos ? 0.5 * static_cast<double>(fit.size()) / static_cast<double>(fit_pos) : 1.0;
    const double w0 = train.class_weight && fit_pos < fit.size()
                          ? 0.5 * static_cast<double>(fit.size()) / static_cast<double>(fit.size() - fit_pos)
                          : 1.0;

    RngStream init(train.seed, kInitStream);
    nn::LayerParams params = init_discriminator(config, frame, init);
    nn::AdamState adam;
    adam.config = train.adam;
    for (int epoch = 1; epoch <= train.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = fit.size() - 1; i > 0; --i) std::swap(fit[i], fit[rng.below(i + 1)]);
        double loss_sum = 0, gn_sum = 0;
        int steps = 0;
        for (std::size_t s = 0; s < fit.size(); s += static_cast<std::size_t>(train.batch_size)) {
            const std::size_t b = std::min(static_cast<std::size_t>(train.batch_size), fit.size() - s);
            if (b < 2) continue;
            const auto idx = std::span(fit).subspan(s, b);
            nn::Tensor y({static_cast<int>(b), 1});
            std::vector<nn::Real> w(b);
            for (std::size_t j = 0; j < b; ++j) {
                y[j] = ds.samples[idx[j]].label;
                w[j] = static_cast<nn::Real>(ds.samples[idx[j]].label ? w1 : w0);
            }
            const auto logits = disc_logits(params, config, batch_features(ds, idx), nn::BatchNormMode::Train);
            auto loss = nn::bce_with_logits(logits, y, w);
            const double lv = loss.item();
            if (!std::isfinite(lv)) throw DivergenceError("discriminator training diverged at epoch " + std::to_string(epoch));
            params.zero_grad();
            loss.backward();
            gn_sum += nn::grad_norm(params);
            nn::adam_step(params, adam);
            if (!params.all_finite()) throw DivergenceError("discriminator parameters became non-finite at epoch " + std::to_string(epoch));
            loss_sum += lv;
            ++steps;
        }
        DiscEpochLog e;
        e.epoch = epoch;
        e.loss = loss_sum / std::max(steps, 1);
        e.grad_norm = gn_sum / std::max(steps, 1);
        e.train_accuracy = accuracy(disc_outputs(params, config, ds, fit), ds, fit);
        e.holdout_accuracy = accuracy(disc_outputs(params, config, ds, result.holdout), ds, result.holdout);
        e.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(e);
        if (on_epoch) on_epoch(e);
    }
    params.zero_grad();
    result.params = std::move(params);
    return result;
}

}  // namespace hrx::decider
