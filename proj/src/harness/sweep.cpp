// SPDX-License-Identifier: Apache-2.0
#include "hrx/harness/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "hrx/channel/fading.hpp"
#include "hrx/errors.hpp"
#include "hrx/parallel.hpp"
#include "hrx/phy/ofdm.hpp"
#include "hrx/rx/traditional.hpp"

#ifndef HRX_BUILD_ID
#define HRX_BUILD_ID "unknown"
#endif

namespace hrx::harness {

namespace {

const std::vector<std::string> kReceivers{"traditional", "perfect", "neural", "hybrid", "genie"};

struct Tally {
    std::uint64_t bit_errors = 0, block_error = 0, info_bit_errors = 0, routed_neural = 0;
};

double ratio(std::uint64_t a, std::uint64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

void SweepConfig::validate() const {
    frame.validate();
    if (receivers.empty()) throw ConfigError("sweep: no receivers configured");
    for (const auto& r : receivers)
        if (std::find(kReceivers.begin(), kReceivers.end(), r) == kReceivers.end())
            throw ConfigError("sweep: unknown receiver '" + r + "'");
    if (channel != kMixedChannel) channel::parse_channel_id(channel);
    if (snr_db.empty()) throw ConfigError("sweep: no SNR points");
    for (double s : snr_db)
        if (!std::isfinite(s)) throw ConfigError("sweep: SNR points must be finite");
    if (blocks < 1) throw ConfigError("sweep: blocks must be positive");
    if (threads < 1) throw ConfigError("sweep: threads must be positive");
}

double SweepRow::uncoded_ber() const { return ratio(bit_errors, bits); }
double SweepRow::bler() const { return ratio(block_errors, blocks); }
double SweepRow::coded_ber() const { return ratio(info_bit_errors, info_bits); }
double SweepRow::route_fraction_neural() const { return ratio(routed_neural, blocks); }

const SweepRow& SweepResult::row(const std::string& receiver, double snr_db) const {
    for (const auto& r : rows)
        if (r.receiver == receiver && r.snr_db == snr_db) return r;
    throw ValidationError("no sweep row for " + receiver + " at " + fmt("%g", snr_db) + " dB");
}

SweepResult run_sweep(const SweepConfig& config, const decider::HybridParts& parts) {
    config.validate();
    using decider::Arch;
    const bool arch2 = config.arch == Arch::II;
    auto need = [&](const std::string& r) {
        return std::find(config.receivers.begin(), config.receivers.end(), r) != config.receivers.end();
    };
    if (!parts.traditional) throw LoadError("sweep: traditional receiver missing");
    if ((need("neural") || (need("genie") && !arch2) || (need("hybrid") && !arch2)) && !parts.neural)
        throw LoadError("sweep: neural receiver checkpoint not loaded");
    if (arch2 && (need("genie") || need("hybrid")) && !parts.enhancer)
        throw LoadError("sweep: enhancer checkpoint not loaded");
    if (need("hybrid") && !parts.disc) throw LoadError("sweep: discriminator checkpoint not loaded");
    if (need("hybrid")) {
        const int want = config.arch == Arch::I ? 0 : config.frame.bits_per_symbol();
        if (parts.disc->config().llr_channels != want)
            throw LoadError("sweep: discriminator inputs do not match Arch " + decider::to_string(config.arch));
    }

    const phy::LdpcCode code(phy::code_params_for(config.frame));
    const std::size_t n_rx = config.receivers.size();
    const std::size_t n_blocks = config.snr_db.size() * static_cast<std::size_t>(config.blocks);
    std::vector<std::vector<Tally>> tallies(n_blocks, std::vector<Tally>(n_rx));
    const bool mixed = config.channel == kMixedChannel;
    const channel::ChannelId fixed = mixed ? channel::ChannelId{} : channel::parse_channel_id(config.channel);

    parallel_for(n_blocks, config.threads, [&](std::size_t g) {
        const double snr = config.snr_db[g / static_cast<std::size_t>(config.blocks)];
        RngStream rng(config.seed, g);
        channel::ChannelId id = fixed;
        if (mixed) {
            const auto pick = rng.below(channel::kNumProfiles + 1);
            id = pick < channel::kNumProfiles ? channel::ChannelId{static_cast<int>(pick)} : config.anomaly;
        }
        const auto tx = phy::make_transmission(code, config.frame, rng);
        const auto h = channel::realize(channel::profile_for(id), config.frame, rng);
        const auto rx = channel::apply(tx.frame.grid, h, snr, config.frame, rng);
        const double nv = channel::noise_variance(snr);

        std::optional<phy::LlrGrid> trad, neural_side;
        auto get_trad = [&]() -> const phy::LlrGrid& {
            if (!trad) trad = parts.traditional->receive(rx, config.frame, nv);
            return *trad;
        };
        auto get_neural_side = [&]() -> const phy::LlrGrid& {
            if (!neural_side)
                neural_side = arch2 ? parts.enhancer->enhance(rx, config.frame, nv, get_trad())
                                    : parts.neural->receive(rx, config.frame, nv);
            return *neural_side;
        };

        for (std::size_t r = 0; r < n_rx; ++r) {
            const auto& name = config.receivers[r];
            phy::LlrGrid llrs;
            Tally& t = tallies[g][r];
            if (name == "traditional") {
                llrs = get_trad();
            } else if (name == "perfect") {
                llrs = rx::perfect_csi_receive(rx, h.freq_response, config.frame, nv);
            } else if (name == "neural") {
                llrs = parts.neural->receive(rx, config.frame, nv);
                t.routed_neural = 1;
            } else if (name == "hybrid") {
                auto out = decider::hybrid_receive(rx, config.arch, parts, config.frame, nv);
                llrs = std::move(out.llrs);
                t.routed_neural = out.verdict.route == decider::Route::Neural;
            } else {  // genie
                const auto en = phy::count_bit_errors(get_neural_side(), tx.frame.bits);
                const auto et = phy::count_bit_errors(get_trad(), tx.frame.bits);
                t.routed_neural = decider::selection_label(en, et);
                llrs = t.routed_neural ? get_neural_side() : get_trad();
            }
            t.bit_errors = phy::count_bit_errors(llrs, tx.frame.bits);
            const auto dec = code.decode(std::span<const double>(llrs.llr).first(static_cast<std::size_t>(code.n())));
            for (std::size_t i = 0; i < tx.info_bits.size(); ++i) t.info_bit_errors += dec.info[i] != tx.info_bits[i];
            t.block_error = t.info_bit_errors > 0;
        }
    });

    SweepResult result;
    const auto bits = static_cast<std::uint64_t>(config.frame.data_bits());
    const auto info = static_cast<std::uint64_t>(code.k());
    for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
        for (std::size_t r = 0; r < n_rx; ++r) {
            SweepRow row;
            row.receiver = config.receivers[r];
            row.channel_index = mixed ? kMixedChannel : fixed.str();
            row.snr_db = config.snr_db[s];
            row.seed = config.seed;
            for (int b = 0; b < config.blocks; ++b) {
                const auto& t = tallies[s * static_cast<std::size_t>(config.blocks) + static_cast<std::size_t>(b)][r];
                row.bits += bits;
                row.bit_errors += t.bit_errors;
                row.blocks += 1;
                row.block_errors += t.block_error;
                row.info_bits += info;
                row.info_bit_errors += t.info_bit_errors;
                row.routed_neural += t.routed_neural;
            }
            result.rows.push_back(row);
        }
    }
    return result;
}

std::string to_csv(const SweepResult& result) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : result.rows) {
        out += r.receiver + "," + r.channel_index + "," + fmt("%g", r.snr_db) + "," + std::to_string(r.bits) + "," +
               std::to_string(r.bit_errors) + "," + fmt("%.6e", r.uncoded_ber()) + "," + std::to_string(r.blocks) + "," +
               std::to_string(r.block_errors) + "," + fmt("%.6e", r.bler()) + "," + fmt("%.6e", r.coded_ber()) + "," +
               fmt("%.6f", r.route_fraction_neural()) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string to_json(const SweepResult& result, const SweepConfig& config) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"receiver", r.receiver},
                        {"channel_index", r.channel_index},
                        {"snr_db", r.snr_db},
                        {"bits", r.bits},
                        {"bit_errors", r.bit_errors},
                        {"uncoded_ber", r.uncoded_ber()},
                        {"blocks", r.blocks},
                        {"block_errors", r.block_errors},
                        {"bler", r.bler()},
                        {"coded_ber", r.coded_ber()},
                        {"route_fraction_neural", r.route_fraction_neural()},
                        {"seed", r.seed}});
    }
    j["rows"] = rows;
    j["config"] = {{"receivers", config.receivers},
                   {"channel", config.channel},
                   {"anomaly", config.anomaly.str()},
                   {"snr_db", config.snr_db},
                   {"blocks", config.blocks},
                   {"seed", config.seed},
                   {"arch", decider::to_string(config.arch)},
                   {"frame", config.frame.summary()}};
    j["build"] = build_id();
    return j.dump(2) + "\n";
}

std::string build_id() { return HRX_BUILD_ID; }

}  // namespace hrx::harness
