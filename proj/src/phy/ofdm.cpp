// SPDX-License-Identifier: Apache-2.0
#include "hrx/phy/ofdm.hpp"

#include <cmath>

#include "hrx/errors.hpp"
#include "hrx/phy/qam.hpp"

namespace hrx::phy {

TxFrame build_grid(std::span<const std::uint8_t> coded_bits, const FrameConfig& config) {
    config.validate();
    const auto expected = static_cast<std::size_t>(config.data_bits());
    if (coded_bits.size() != expected) {
        throw ValidationError("build_grid: got " + std::to_string(coded_bits.size()) + " bits, grid carries " +
                              std::to_string(expected));
    }
    TxFrame tx;
    tx.grid = ResourceGrid(1, config.num_ofdm_symbols, config.num_subcarriers);
    tx.bits.assign(coded_bits.begin(), coded_bits.end());
    tx.data_symbols = qam_map(coded_bits, config.modulation);

    const ComplexVec pilots = pilot_sequence(config);
    std::size_t s = 0;
    for (int t = 0; t < config.num_ofdm_symbols; ++t) {
        const bool pilot = config.is_pilot_symbol(t);
        for (int k = 0; k < config.num_subcarriers; ++k) {
            tx.grid.at(0, t, k) = pilot ? pilots[static_cast<std::size_t>(k)] : tx.data_symbols[s++];
        }
    }
    return tx;
}

std::vector<ComplexVec> ofdm_modulate(const ResourceGrid& grid, const FrameConfig& config) {
    const int n = config.fft_size, cp = config.cp_length, len = n + cp;
    const double scale = std::sqrt(static_cast<double>(n));
    std::vector<ComplexVec> out(static_cast<std::size_t>(grid.antennas()),
                                ComplexVec(static_cast<std::size_t>(len) * grid.symbols()));
    ComplexVec buf(static_cast<std::size_t>(n));
    for (int a = 0; a < grid.antennas(); ++a) {
        for (int t = 0; t < grid.symbols(); ++t) {
            std::fill(buf.begin(), buf.end(), cplx{});
            for (int k = 0; k < grid.subcarriers(); ++k) buf[static_cast<std::size_t>(config.fft_bin(k))] = grid.at(a, t, k);
            fft_inplace(buf, true);
            cplx* dst = out[static_cast<std::size_t>(a)].data() + static_cast<std::size_t>(t) * len;
            for (int i = 0; i < cp; ++i) dst[i] = buf[static_cast<std::size_t>(n - cp + i)] * scale;
            for (int i = 0; i < n; ++i) dst[cp + i] = buf[static_cast<std::size_t>(i)] * scale;
        }
    }
    return out;
}

ResourceGrid ofdm_demodulate(const std::vector<ComplexVec>& samples, const FrameConfig& config) {
    const int n = config.fft_size, cp = config.cp_length, len = n + cp;
    const int symbols = config.num_ofdm_symbols;
    ResourceGrid grid(static_cast<int>(samples.size()), symbols, config.num_subcarriers);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexVec buf(static_cast<std::size_t>(n));
    for (int a = 0; a < grid.antennas(); ++a) {
        const auto& x = samples[static_cast<std::size_t>(a)];
        if (x.size() != static_cast<std::size_t>(len) * symbols) {
            throw ValidationError("ofdm_demodulate: antenna " + std::to_string(a) + " has " +
                                  std::to_string(x.size()) + " samples");
        }
        for (int t = 0; t < symbols; ++t) {
            const cplx* src = x.data() + static_cast<std::size_t>(t) * len + cp;
            std::copy(src, src + n, buf.begin());
            fft_inplace(buf, false);
            for (int k = 0; k < config.num_subcarriers; ++k) {
                grid.at(a, t, k) = buf[static_cast<std::size_t>(config.fft_bin(k))] * scale;
            }
        }
    }
    return grid;
}

LdpcCode::Params code_params_for(const FrameConfig& config) {
    LdpcCode::Params p;
    p.n = config.data_bits() / 8 * 8;
    p.k = p.n / 2;
    return p;
}

Transmission make_transmission(const LdpcCode& code, const FrameConfig& config, RngStream& rng) {
    Transmission tr;
    tr.info_bits.resize(static_cast<std::size_t>(code.k()));
    for (auto& b : tr.info_bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    auto bits = code.encode(tr.info_bits);
    while (static_cast<int>(bits.size()) < config.data_bits()) bits.push_back(static_cast<std::uint8_t>(rng.next_u32() & 1u));
    tr.frame = build_grid(bits, config);
    return tr;
}

}  // namespace hrx::phy
