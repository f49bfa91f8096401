// SPDX-License-Identifier: Apache-2.0
#include "hrx/decider/hybrid.hpp"

#include <algorithm>
#include <cctype>

#include "hrx/errors.hpp"
#include "hrx/rx/traditional.hpp"

namespace hrx::decider {

namespace {

template <class T>
T& require(T* part, const char* what, Arch arch) {
    if (!part) throw LoadError("Arch " + to_string(arch) + " needs the " + what + " (checkpoint not loaded)");
    return *part;
}

}  // namespace

phy::LlrGrid TraditionalReceiver::receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame,
                                          double noise_var) {
    return rx::traditional_receive(rx_grid, frame, noise_var);
}

phy::LlrGrid NeuralReceiver::receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame,
                                     double noise_var) {
    return neural::neural_receive(params_, config_, frame, rx_grid, noise_var);
}

phy::LlrGrid NeuralEnhancer::enhance(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame,
                                     double noise_var, const phy::LlrGrid& traditional) {
    return neural::neural_receive(params_, config_, frame, rx_grid, noise_var, &traditional);
}

std::string to_string(Arch arch) {
    switch (arch) {
        case Arch::I: return "I";
        case Arch::II: return "II";
        case Arch::III: return "III";
    }
    return "?";
}

Arch parse_arch(const std::string& text) {
    std::string t;
    for (char c : text) t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (t == "I" || t == "1") return Arch::I;
    if (t == "II" || t == "2") return Arch::II;
    if (t == "III" || t == "3") return Arch::III;
    throw ConfigError("unknown architecture '" + text + "' (expected I, II or III)");
}

std::string to_string(Route route) { return route == Route::Neural ? "neural" : "traditional"; }

HybridOutput hybrid_receive(const phy::ResourceGrid& rx_grid, Arch arch, const HybridParts& parts,
                            const phy::FrameConfig& frame, double noise_var) {
    auto& disc = require(parts.disc, "discriminator", arch);
    auto& trad = require(parts.traditional, "traditional receiver", arch);
    HybridOutput out;
    switch (arch) {
        case Arch::I: {
            auto& neural = require(parts.neural, "neural receiver", arch);
            out.verdict.u = disc.u(disc_featurize(rx_grid, frame, disc.config()));
            out.verdict.route = route_for(out.verdict.u, out.verdict.threshold);
            out.llrs = out.verdict.route == Route::Neural ? neural.receive(rx_grid, frame, noise_var)
                                                          : trad.receive(rx_grid, frame, noise_var);
            break;
        }
        case Arch::II: {
            auto& enhancer = require(parts.enhancer, "neural enhancer", arch);
            auto trad_llrs = trad.receive(rx_grid, frame, noise_var);
            out.verdict.u = disc.u(disc_featurize(rx_grid, frame, disc.config(), &trad_llrs));
            out.verdict.route = route_for(out.verdict.u, out.verdict.threshold);
            out.llrs = out.verdict.route == Route::Neural ? enhancer.enhance(rx_grid, frame, noise_var, trad_llrs)
                                                          : std::move(trad_llrs);
            break;
        }
        case Arch::III: {
            auto& neural = require(parts.neural, "neural receiver", arch);
            auto neural_llrs = neural.receive(rx_grid, frame, noise_var);
            out.verdict.u = disc.u(disc_featurize(rx_grid, frame, disc.config(), &neural_llrs));
            out.verdict.route = route_for(out.verdict.u, out.verdict.threshold);
            out.llrs = out.verdict.route == Route::Neural ? std::move(neural_llrs) : trad.receive(rx_grid, frame, noise_var);
            break;
        }
    }
    return out;
}

GenieOutput genie_select(const phy::ResourceGrid& rx_grid, std::span<const std::uint8_t> truth,
                         const HybridParts& parts, const phy::FrameConfig& frame, double noise_var) {
    if (!parts.neural || !parts.traditional) throw LoadError("genie selection needs both receivers");
    auto n = parts.neural->receive(rx_grid, frame, noise_var);
    auto t = parts.traditional->receive(rx_grid, frame, noise_var);
    GenieOutput out;
    out.neural_errors = phy::count_bit_errors(n, truth);
    out.trad_errors = phy::count_bit_errors(t, truth);
    out.route = selection_label(out.neural_errors, out.trad_errors) ? Route::Neural : Route::Traditional;
    out.llrs = out.route == Route::Neural ? std::move(n) : std::move(t);
    return out;
}

}  // namespace hrx::decider
