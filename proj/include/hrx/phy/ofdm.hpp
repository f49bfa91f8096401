// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrx/mathdsp/rng.hpp"
#include "hrx/phy/frame.hpp"
#include "hrx/phy/ldpc.hpp"

namespace hrx::phy {

/// Transmit-side grid plus the ground truth needed to score receivers.
struct TxFrame {
    ResourceGrid grid;                      // one antenna port
    std::vector<std::uint8_t> bits;         // data bits in LLR order
    ComplexVec data_symbols;                // mapped symbols in data-RE order
};

/// Places pilots and mapped data on a single-port grid. The bit count must equal
/// data REs times bits per symbol.
TxFrame build_grid(std::span<const std::uint8_t> coded_bits, const FrameConfig& config);

/// Per-port time-domain samples: each symbol is an IFFT of fft_size (unitary
/// scaling) with cp_length samples of cyclic prefix in front.
std::vector<ComplexVec> ofdm_modulate(const ResourceGrid& grid, const FrameConfig& config);
/// Drops the cyclic prefix, applies the FFT and returns the used bins.
ResourceGrid ofdm_demodulate(const std::vector<ComplexVec>& samples, const FrameConfig& config);

inline int ofdm_symbol_length(const FrameConfig& config) { return config.fft_size + config.cp_length; }

/// Code sized to fill one grid: n = data bits rounded down to a multiple of 8, k = n/2.
LdpcCode::Params code_params_for(const FrameConfig& config);

/// One coded TTI: random info bits, LDPC codeword, filler bits for any data
/// capacity the codeword does not cover, and the built grid.
struct Transmission {
    std::vector<std::uint8_t> info_bits;
    TxFrame frame;
};
Transmission make_transmission(const LdpcCode& code, const FrameConfig& config, RngStream& rng);

}  // namespace hrx::phy
