// SPDX-License-Identifier: Apache-2.0
#include "hrx/harness/settings.hpp"

#include "hrx/errors.hpp"

namespace hrx::harness {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "frame.symbols",        "frame.subcarriers",   "frame.fft_size",     "frame.cp_length",
        "frame.modulation",     "frame.pilots",        "frame.antennas",     "frame.cell_id",
        "neural.blocks",        "neural.filters",      "neural.ls_features", "neural.checkpoint",
        "enhancer.checkpoint",  "train.channels",      "train.snr_lo",       "train.snr_hi",
        "train.samples",        "train.batch",         "train.epochs",       "train.lr",
        "train.lr_final",       "train.seed",          "train.enhancer",     "label.channels",
        "label.anomaly",        "label.anomaly_fraction", "label.snr_lo",    "label.snr_hi",
        "label.count",          "label.seed",          "label.arch",         "disc.epochs",
        "disc.batch",           "disc.lr",             "disc.holdout",       "disc.class_weight",
        "disc.seed",            "disc.checkpoint",     "disc.dataset",       "sweep.receivers",
        "sweep.channel",        "sweep.anomaly",       "sweep.snr_db",       "sweep.blocks",
        "sweep.seed",           "sweep.arch",
    };
    return keys;
}

std::vector<channel::ChannelId> parse_channel_list(const std::vector<std::string>& items) {
    std::vector<channel::ChannelId> out;
    for (const auto& s : items) out.push_back(channel::parse_channel_id(s));
    return out;
}

phy::FrameConfig frame_from(const Config& c) {
    phy::FrameConfig f;
    f.num_ofdm_symbols = c.get_int("frame.symbols", f.num_ofdm_symbols);
    f.num_subcarriers = c.get_int("frame.subcarriers", f.num_subcarriers);
    f.fft_size = c.get_int("frame.fft_size", f.fft_size);
    f.cp_length = c.get_int("frame.cp_length", f.cp_length);
    if (c.has("frame.modulation")) f.modulation = phy::parse_modulation(c.get_string("frame.modulation", ""));
    if (c.has("frame.pilots")) {
        f.pilot_symbols.clear();
        for (double v : c.get_doubles("frame.pilots", {})) f.pilot_symbols.push_back(static_cast<int>(v));
    }
    f.num_rx_antennas = c.get_int("frame.antennas", f.num_rx_antennas);
    f.cell_id = c.get_u64("frame.cell_id", f.cell_id);
    f.validate();
    return f;
}

neural::NeuralRxConfig neural_from(const Config& c, bool paper_scale) {
    auto n = paper_scale ? neural::NeuralRxConfig::paper_scale() : neural::NeuralRxConfig{};
    n.num_res_blocks = c.get_int("neural.blocks", n.num_res_blocks);
    n.filters = c.get_int("neural.filters", n.filters);
    n.ls_features = c.get_bool("neural.ls_features", n.ls_features);
    n.validate();
    return n;
}

neural::NeuralRxConfig enhancer_from(const Config& c, const phy::FrameConfig& frame, bool paper_scale) {
    auto n = neural_from(c, paper_scale);
    n.llr_channels = frame.bits_per_symbol();
    return n;
}

neural::TrainRecipe train_recipe_from(const Config& c) {
    neural::TrainRecipe r;
    if (c.has("train.channels")) r.channels = parse_channel_list(c.get_list("train.channels", {}));
    r.snr_lo_db = c.get_double("train.snr_lo", r.snr_lo_db);
    r.snr_hi_db = c.get_double("train.snr_hi", r.snr_hi_db);
    r.num_samples = c.get_int("train.samples", r.num_samples);
    r.batch_size = c.get_int("train.batch", r.batch_size);
    r.epochs = c.get_int("train.epochs", r.epochs);
    r.adam.lr = c.get_double("train.lr", r.adam.lr);
    r.lr_final = c.get_double("train.lr_final", r.lr_final);
    r.seed = c.get_u64("train.seed", r.seed);
    r.validate();
    return r;
}

decider::DiscConfig disc_from(const Config&, const phy::FrameConfig& frame, decider::Arch arch) {
    decider::DiscConfig d;
    d.llr_channels = arch == decider::Arch::I ? 0 : frame.bits_per_symbol();
    d.validate();
    return d;
}

decider::DiscRecipe disc_recipe_from(const Config& c) {
    decider::DiscRecipe r;
    if (c.has("label.channels")) r.in_family = parse_channel_list(c.get_list("label.channels", {}));
    if (c.has("label.anomaly")) r.anomaly = channel::parse_channel_id(c.get_string("label.anomaly", ""));
    r.anomaly_fraction = c.get_double("label.anomaly_fraction", r.anomaly_fraction);
    r.snr_lo_db = c.get_double("label.snr_lo", r.snr_lo_db);
    r.snr_hi_db = c.get_double("label.snr_hi", r.snr_hi_db);
    r.count = c.get_int("label.count", r.count);
    r.seed = c.get_u64("label.seed", r.seed);
    r.arch = decider::parse_arch(c.get_string("label.arch", decider::to_string(r.arch)));
    r.validate();
    return r;
}

decider::DiscTrainConfig disc_train_from(const Config& c) {
    decider::DiscTrainConfig t;
    t.epochs = c.get_int("disc.epochs", t.epochs);
    t.batch_size = c.get_int("disc.batch", t.batch_size);
    t.adam.lr = c.get_double("disc.lr", t.adam.lr);
    t.holdout_fraction = c.get_double("disc.holdout", t.holdout_fraction);
    t.class_weight = c.get_bool("disc.class_weight", t.class_weight);
    t.seed = c.get_u64("disc.seed", t.seed);
    return t;
}

SweepConfig sweep_from(const Config& c) {
    SweepConfig s;
    s.frame = frame_from(c);
    s.receivers = c.get_list("sweep.receivers", s.receivers);
    s.channel = c.get_string("sweep.channel", s.channel);
    if (c.has("sweep.anomaly")) s.anomaly = channel::parse_channel_id(c.get_string("sweep.anomaly", ""));
    s.snr_db = c.get_doubles("sweep.snr_db", s.snr_db);
    s.blocks = c.get_int("sweep.blocks", s.blocks);
    s.seed = c.get_u64("sweep.seed", s.seed);
    s.arch = decider::parse_arch(c.get_string("sweep.arch", decider::to_string(s.arch)));
    s.validate();
    return s;
}

}  // namespace hrx::harness
