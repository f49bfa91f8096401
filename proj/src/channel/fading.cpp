// SPDX-License-Identifier: Apache-2.0
#include "hrx/channel/fading.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hrx/errors.hpp"
#include "hrx/phy/ofdm.hpp"

namespace hrx::channel {

namespace {

// Lower Cholesky factor of the exponential correlation matrix R[a][b] = rho^|a-b|.
std::vector<double> correlation_factor(int n, double rho) {
    std::vector<double> r(static_cast<std::size_t>(n * n)), l(r.size(), 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) r[static_cast<std::size_t>(a * n + b)] = std::pow(rho, std::abs(a - b));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = r[static_cast<std::size_t>(i * n + j)];
            for (int k = 0; k < j; ++k) s -= l[static_cast<std::size_t>(i * n + k)] * l[static_cast<std::size_t>(j * n + k)];
            if (i == j) l[static_cast<std::size_t>(i * n + i)] = std::sqrt(std::max(s, 0.0));
            else l[static_cast<std::size_t>(i * n + j)] = s / l[static_cast<std::size_t>(j * n + j)];
        }
    }
    return l;
}

}  // namespace

double noise_variance(double snr_db) {
    if (std::isnan(snr_db)) throw ConfigError("snr_db is NaN");
    if (std::isinf(snr_db)) return snr_db > 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(10.0, -snr_db / 10.0);
}

ChannelRealization realize(const ChannelProfile& profile, const phy::FrameConfig& config, RngStream& rng) {
    config.validate();
    if (profile.spatial_corr < 0 || profile.spatial_corr >= 1) throw ConfigError("spatial_corr must be in [0,1)");
    if (profile.doppler_coherence < 0 || profile.doppler_coherence > 1) throw ConfigError("doppler_coherence must be in [0,1]");
    const int n_ant = config.num_rx_antennas;
    const int n_sym = config.num_ofdm_symbols;
    const int n_sc = config.num_subcarriers;
    const int n_taps = static_cast<int>(profile.pdp.size());
    const double fs = config.sample_rate();

    ChannelRealization h;
    h.profile_index = profile.index;
    h.time_domain = profile.anomalous;
    for (const auto& tap : profile.pdp) {
        double d = tap.delay;
        if (profile.anomalous) {
            d = std::round(d * fs) / fs;
        } else if (d > config.cp_duration() * (1 + 1e-9)) {
            throw ConfigError("profile " + profile.label() + " has a tap beyond the cyclic prefix");
        }
        h.tap_delays.push_back(d);
    }

    const auto chol = correlation_factor(n_ant, profile.spatial_corr);
    const double rho_t = profile.doppler_coherence;
    const double innov = std::sqrt(std::max(0.0, 1.0 - rho_t * rho_t));
    h.tap_gains.assign(static_cast<std::size_t>(n_ant * n_sym * n_taps), cplx{});
    auto gain = [&](int a, int t, int l) -> cplx& {
        return h.tap_gains[(static_cast<std::size_t>(a) * n_sym + t) * n_taps + l];
    };
    std::vector<cplx> w(static_cast<std::size_t>(n_ant));
    for (int l = 0; l < n_taps; ++l) {
        const double amp = std::sqrt(profile.pdp[static_cast<std::size_t>(l)].power);
        for (int t = 0; t < n_sym; ++t) {
            if (t > 0 && rho_t == 1.0) {
                for (int a = 0; a < n_ant; ++a) gain(a, t, l) = gain(a, t - 1, l);
                continue;
            }
            for (auto& v : w) v = profile.fading ? rng.complex_normal() : cplx(1.0);
            for (int a = 0; a < n_ant; ++a) {
                cplx c{};
                for (int b = 0; b <= a; ++b) c += chol[static_cast<std::size_t>(a * n_ant + b)] * w[static_cast<std::size_t>(b)];
                c *= amp;
                gain(a, t, l) = t == 0 ? c : rho_t * gain(a, t - 1, l) + innov * c;
            }
        }
    }

    std::vector<cplx> phasor(static_cast<std::size_t>(n_taps * n_sc));
    for (int l = 0; l < n_taps; ++l)
        for (int k = 0; k < n_sc; ++k)
            phasor[static_cast<std::size_t>(l * n_sc + k)] =
                std::polar(1.0, -2.0 * std::numbers::pi * config.subcarrier_frequency(k) * h.tap_delays[static_cast<std::size_t>(l)]);

    h.freq_response = phy::ResourceGrid(n_ant, n_sym, n_sc);
    for (int a = 0; a < n_ant; ++a) {
        for (int t = 0; t < n_sym; ++t) {
            if (t > 0 && rho_t == 1.0) {
                for (int k = 0; k < n_sc; ++k) h.freq_response.at(a, t, k) = h.freq_response.at(a, t - 1, k);
                continue;
            }
            for (int k = 0; k < n_sc; ++k) {
                cplx s{};
                for (int l = 0; l < n_taps; ++l) s += gain(a, t, l) * phasor[static_cast<std::size_t>(l * n_sc + k)];
                h.freq_response.at(a, t, k) = s;
            }
        }
    }
    return h;
}

phy::ResourceGrid apply_time_domain(const phy::ResourceGrid& tx_grid, const ChannelRealization& h,
                                    const phy::FrameConfig& config) {
    const auto x = phy::ofdm_modulate(tx_grid, config)[0];
    const int sym_len = phy::ofdm_symbol_length(config);
    const double fs = config.sample_rate();
    std::vector<long> d;
    for (double tau : h.tap_delays) d.push_back(std::lround(tau * fs));

    const int n_ant = h.freq_response.antennas();
    std::vector<ComplexVec> y(static_cast<std::size_t>(n_ant), ComplexVec(x.size()));
    for (int a = 0; a < n_ant; ++a) {
        auto& ya = y[static_cast<std::size_t>(a)];
        for (std::size_t n = 0; n < x.size(); ++n) {
            const int t = static_cast<int>(n / static_cast<std::size_t>(sym_len));
            cplx s{};
            for (int l = 0; l < h.num_taps(); ++l) {
                const long src = static_cast<long>(n) - d[static_cast<std::size_t>(l)];
                if (src >= 0) s += h.gain(a, t, l) * x[static_cast<std::size_t>(src)];
            }
            ya[n] = s;
        }
    }
    return phy::ofdm_demodulate(y, config);
}

phy::ResourceGrid apply(const phy::ResourceGrid& tx_grid, const ChannelRealization& h, double snr_db,
                        const phy::FrameConfig& config, RngStream& rng) {
    const auto& hf = h.freq_response;
    if (tx_grid.antennas() != 1 || tx_grid.symbols() != hf.symbols() || tx_grid.subcarriers() != hf.subcarriers())
        throw ValidationError("transmit grid shape does not match the channel realization");
    const double nv = noise_variance(snr_db);
    if (std::isinf(nv)) throw ConfigError("snr_db = -inf");

    phy::ResourceGrid rx;
    if (h.time_domain) {
        rx = apply_time_domain(tx_grid, h, config);
    } else {
        rx = phy::ResourceGrid(hf.antennas(), hf.symbols(), hf.subcarriers());
        for (int a = 0; a < hf.antennas(); ++a)
            for (int t = 0; t < hf.symbols(); ++t)
                for (int k = 0; k < hf.subcarriers(); ++k) rx.at(a, t, k) = hf.at(a, t, k) * tx_grid.at(0, t, k);
    }
    if (nv > 0) {
        const double sd = std::sqrt(nv);
        for (auto& v : rx.samples()) v += sd * rng.complex_normal();
    }
    return rx;
}

}  // namespace hrx::channel
