// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hrx/mathdsp/fft.hpp"

namespace hrx::phy {

enum class Modulation { Qam4, Qam16, Qam64 };

int bits_per_symbol(Modulation mod);
std::string to_string(Modulation mod);
/// Accepts "qam4"/"4qam"/"qpsk", "qam16", "qam64" (case-insensitive).
Modulation parse_modulation(const std::string& text);

/// Layout of one transmission time interval.
struct FrameConfig {
    int num_ofdm_symbols = 14;
    int num_subcarriers = 64;
    int fft_size = 128;
    int cp_length = 16;
    double subcarrier_spacing = 15000.0;
    Modulation modulation = Modulation::Qam4;
    std::vector<int> pilot_symbols{2, 11};
    int num_rx_antennas = 2;
    std::uint64_t cell_id = 0;  // seeds the pilot sequence

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    double sample_rate() const { return fft_size * subcarrier_spacing; }
    double cp_duration() const { return cp_length / sample_rate(); }
    int bits_per_symbol() const { return phy::bits_per_symbol(modulation); }
    bool is_pilot_symbol(int t) const;
    std::vector<int> data_symbols() const;
    int num_data_res() const;
    int data_bits() const { return num_data_res() * bits_per_symbol(); }
    /// Baseband frequency of subcarrier k; subcarriers occupy centered bins.
    double subcarrier_frequency(int k) const;
    /// FFT bin carrying subcarrier k.
    int fft_bin(int k) const;
    std::string summary() const;
};

/// Complex samples over (antenna, OFDM symbol, subcarrier) for one TTI.
class ResourceGrid {
public:
    ResourceGrid() = default;
    ResourceGrid(int antennas, int symbols, int subcarriers)
        : antennas_(antennas), symbols_(symbols), subcarriers_(subcarriers),
          samples_(static_cast<std::size_t>(antennas) * symbols * subcarriers) {}

    int antennas() const { return antennas_; }
    int symbols() const { return symbols_; }
    int subcarriers() const { return subcarriers_; }

    cplx& at(int a, int t, int k) { return samples_[index(a, t, k)]; }
    const cplx& at(int a, int t, int k) const { return samples_[index(a, t, k)]; }
    ComplexVec& samples() { return samples_; }
    const ComplexVec& samples() const { return samples_; }

    bool same_shape(const ResourceGrid& o) const {
        return antennas_ == o.antennas_ && symbols_ == o.symbols_ && subcarriers_ == o.subcarriers_;
    }

private:
    std::size_t index(int a, int t, int k) const {
        return (static_cast<std::size_t>(a) * symbols_ + t) * subcarriers_ + k;
    }

    int antennas_ = 0;
    int symbols_ = 0;
    int subcarriers_ = 0;
    ComplexVec samples_;
};

/// Per-bit LLRs over the data REs, ordered by (data symbol, subcarrier, bit).
/// Positive means bit 0 is more likely.
struct LlrGrid {
    std::vector<double> llr;
};

/// Hard decisions under the LLR sign convention (llr < 0 -> 1).
std::vector<std::uint8_t> hard_decisions(const LlrGrid& llrs);

/// Uncoded errors of the hard decisions against the transmitted bits.
std::size_t count_bit_errors(const LlrGrid& llrs, std::span<const std::uint8_t> bits);

/// Unit-modulus QPSK pilot value per subcarrier, identical on every pilot symbol.
ComplexVec pilot_sequence(const FrameConfig& config);

}  // namespace hrx::phy
