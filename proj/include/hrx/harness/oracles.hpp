// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hrx::harness {

struct OracleResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Uncoded QAM4 over AWGN against Q(sqrt(2 Eb/N0)) at 2, 4, 6 dB, 1e5 bits per
/// point, within 3 standard errors.
OracleResult oracle_awgn();
/// Uncoded QAM4 over flat Rayleigh, one antenna, perfect CSI, against
/// (1 - sqrt(g/(1+g)))/2 at 5, 10, 15 dB.
OracleResult oracle_rayleigh();
/// Noise-free LS equals the channel at pilots to 1e-12; LS error variance at
/// pilots equals N0 within 2% over 1e4 realizations.
OracleResult oracle_ls();
/// Unbiased scalar LMMSE equals MRC on 1e4 SIMO draws to 1e-9; perfect-CSI BER
/// no worse than LS-LMMSE at 0..20 dB.
OracleResult oracle_lmmse();
/// Finite differences against backprop for every nn layer on 20 random shapes.
OracleResult oracle_gradients();
/// Noise-free round trip on 100 words; a single weak wrong bit is corrected;
/// coded BER below uncoded BER at 6 dB AWGN.
OracleResult oracle_ldpc();

struct NamedOracle {
    std::string name;
    std::function<OracleResult()> run;
};
const std::vector<NamedOracle>& oracle_suite();

/// "PASS name (1.2 s): detail"
std::string format_oracle(const OracleResult& r);

}  // namespace hrx::harness
