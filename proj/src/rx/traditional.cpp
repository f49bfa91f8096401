// SPDX-License-Identifier: Apache-2.0
#include "hrx/rx/traditional.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hrx/errors.hpp"
#include "hrx/phy/qam.hpp"

namespace hrx::rx {

phy::ResourceGrid ls_estimate(const phy::ResourceGrid& rx_grid, std::span<const cplx> pilots,
                              const phy::FrameConfig& config) {
    if (pilots.size() != static_cast<std::size_t>(rx_grid.subcarriers()))
        throw ValidationError("pilot sequence length does not match the grid");
    for (const auto& p : pilots)
        if (std::norm(p) == 0.0) throw ValidationError("zero pilot symbol");
    const int np = static_cast<int>(config.pilot_symbols.size());
    phy::ResourceGrid est(rx_grid.antennas(), np, rx_grid.subcarriers());
    for (int a = 0; a < rx_grid.antennas(); ++a)
        for (int i = 0; i < np; ++i)
            for (int k = 0; k < rx_grid.subcarriers(); ++k)
                est.at(a, i, k) = rx_grid.at(a, config.pilot_symbols[static_cast<std::size_t>(i)], k) / pilots[static_cast<std::size_t>(k)];
    return est;
}

ChannelEstimate interpolate(const phy::ResourceGrid& pilot_estimates, const phy::FrameConfig& config,
                            TimeInterpolation mode) {
    const auto& ps = config.pilot_symbols;
    if (ps.size() < 2) throw ConfigError("time interpolation needs at least two pilot symbols");
    if (pilot_estimates.symbols() != static_cast<int>(ps.size())) throw ValidationError("pilot estimate rows do not match the pilot symbols");

    std::vector<int> order(ps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ps[static_cast<std::size_t>(a)] < ps[static_cast<std::size_t>(b)]; });

    ChannelEstimate out;
    out.est = phy::ResourceGrid(pilot_estimates.antennas(), config.num_ofdm_symbols, pilot_estimates.subcarriers());
    for (int t = 0; t < config.num_ofdm_symbols; ++t) {
        int lo = order[0], hi = order[1];
        for (std::size_t j = 1; j + 1 < order.size(); ++j) {
            if (t > ps[static_cast<std::size_t>(order[j])]) {
                lo = order[j];
                hi = order[j + 1];
            }
        }
        const double t0 = ps[static_cast<std::size_t>(lo)], t1 = ps[static_cast<std::size_t>(hi)];
        double w = (t - t0) / (t1 - t0);
        if (mode == TimeInterpolation::Nearest) {
            int best = order[0];
            for (int j : order)
                if (std::abs(t - ps[static_cast<std::size_t>(j)]) < std::abs(t - ps[static_cast<std::size_t>(best)])) best = j;
            lo = hi = best;
            w = 0.0;
        }
        for (int a = 0; a < out.est.antennas(); ++a)
            for (int k = 0; k < out.est.subcarriers(); ++k)
                out.est.at(a, t, k) = pilot_estimates.at(a, lo, k) + w * (pilot_estimates.at(a, hi, k) - pilot_estimates.at(a, lo, k));
    }
    return out;
}

Equalized lmmse_equalize(std::span<const cplx> y, std::span<const cplx> h, double noise_var) {
    if (!(noise_var > 0)) throw ValidationError("noise_var must be positive");
    if (y.size() != h.size()) throw ValidationError("y and h lengths differ");
    double hh = 0;
    cplx hy{};
    for (std::size_t i = 0; i < h.size(); ++i) {
        hh += std::norm(h[i]);
        hy += std::conj(h[i]) * y[i];
    }
    if (hh < 1e-30) return {cplx{}, 0.0, true};
    const cplx raw = hy / (hh + noise_var);
    const double beta = hh / (hh + noise_var);
    return {raw / beta, noise_var / hh, false};
}

phy::LlrGrid equalize_and_demap(const phy::ResourceGrid& rx_grid, const phy::ResourceGrid& h,
                                const phy::FrameConfig& config, double noise_var) {
    if (!rx_grid.same_shape(h)) throw ValidationError("channel estimate shape does not match the received grid");
    const int n_ant = rx_grid.antennas();
    const int bps = config.bits_per_symbol();
    phy::LlrGrid out;
    out.llr.reserve(static_cast<std::size_t>(config.data_bits()));
    std::vector<cplx> y(static_cast<std::size_t>(n_ant)), hv(y.size());
    for (int t : config.data_symbols()) {
        for (int k = 0; k < rx_grid.subcarriers(); ++k) {
            for (int a = 0; a < n_ant; ++a) {
                y[static_cast<std::size_t>(a)] = rx_grid.at(a, t, k);
                hv[static_cast<std::size_t>(a)] = h.at(a, t, k);
            }
            const auto eq = lmmse_equalize(y, hv, noise_var);
            if (eq.erasure) out.llr.insert(out.llr.end(), static_cast<std::size_t>(bps), 0.0);
            else phy::qam_demap_maxlog(eq.z, eq.eff_noise_var, config.modulation, out.llr);
        }
    }
    return out;
}

phy::LlrGrid traditional_receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& config, double noise_var,
                                 TimeInterpolation mode) {
    const auto pilots = phy::pilot_sequence(config);
    const auto est = interpolate(ls_estimate(rx_grid, pilots, config), config, mode);
    return equalize_and_demap(rx_grid, est.est, config, noise_var);
}

phy::LlrGrid perfect_csi_receive(const phy::ResourceGrid& rx_grid, const phy::ResourceGrid& h_true,
                                 const phy::FrameConfig& config, double noise_var) {
    return equalize_and_demap(rx_grid, h_true, config, noise_var);
}

}  // namespace hrx::rx
