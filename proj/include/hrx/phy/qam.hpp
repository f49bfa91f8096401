// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrx/mathdsp/fft.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::phy {

/// Gray-mapped square QAM with unit average energy. Even-indexed bits of each
/// symbol select the in-phase level, odd-indexed bits the quadrature level;
/// bits 00 of QAM4 map to (1+j)/sqrt(2).
ComplexVec qam_map(std::span<const std::uint8_t> bits, Modulation mod);

/// All constellation points, indexed by the integer whose bit i (LSB first)
/// is the i-th bit of the symbol.
const ComplexVec& constellation(Modulation mod);

/// Max-log LLRs of one equalized symbol, appended to out.
/// LLR_i = (min_{s: b_i=1} |z-s|^2 - min_{s: b_i=0} |z-s|^2) / noise_var.
void qam_demap_maxlog(cplx z, double noise_var, Modulation mod, std::vector<double>& out);
std::vector<double> qam_demap_maxlog(cplx z, double noise_var, Modulation mod);

/// Nearest-point detection.
std::vector<std::uint8_t> qam_demap_hard(std::span<const cplx> symbols, Modulation mod);

}  // namespace hrx::phy
