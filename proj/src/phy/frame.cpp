// SPDX-License-Identifier: Apache-2.0
#include "hrx/phy/frame.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hrx/errors.hpp"
#include "hrx/mathdsp/rng.hpp"

namespace hrx::phy {

int bits_per_symbol(Modulation mod) {
    switch (mod) {
        case Modulation::Qam4: return 2;
        case Modulation::Qam16: return 4;
        case Modulation::Qam64: return 6;
    }
    return 0;
}

std::string to_string(Modulation mod) {
    switch (mod) {
        case Modulation::Qam4: return "qam4";
        case Modulation::Qam16: return "qam16";
        case Modulation::Qam64: return "qam64";
    }
    return "?";
}

Modulation parse_modulation(const std::string& text) {
    std::string s;
    for (char c : text) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "qam4" || s == "4qam" || s == "qpsk" || s == "4-qam") return Modulation::Qam4;
    if (s == "qam16" || s == "16qam" || s == "16-qam") return Modulation::Qam16;
    if (s == "qam64" || s == "64qam" || s == "64-qam") return Modulation::Qam64;
    throw ConfigError("unknown modulation '" + text + "'");
}

void FrameConfig::validate() const {
    if (num_ofdm_symbols != 14) throw ConfigError("num_ofdm_symbols must be 14");
    if (num_subcarriers <= 0) throw ConfigError("num_subcarriers must be positive");
    if (!is_power_of_two(static_cast<std::size_t>(fft_size))) throw ConfigError("fft_size must be a power of two");
    if (num_subcarriers > fft_size) throw ConfigError("num_subcarriers exceeds fft_size");
    if (cp_length < 0 || cp_length > fft_size) throw ConfigError("cp_length out of range");
    if (!(subcarrier_spacing > 0)) throw ConfigError("subcarrier_spacing must be positive");
    if (num_rx_antennas <= 0) throw ConfigError("num_rx_antennas must be positive");
    if (pilot_symbols.size() < 2) throw ConfigError("at least two pilot symbols are required");
    for (std::size_t i = 0; i < pilot_symbols.size(); ++i) {
        const int t = pilot_symbols[i];
        if (t < 0 || t >= num_ofdm_symbols) throw ConfigError("pilot symbol " + std::to_string(t) + " outside [0,13]");
        if (i > 0 && t <= pilot_symbols[i - 1]) throw ConfigError("pilot symbols must be strictly increasing");
    }
}

bool FrameConfig::is_pilot_symbol(int t) const {
    return std::find(pilot_symbols.begin(), pilot_symbols.end(), t) != pilot_symbols.end();
}

std::vector<int> FrameConfig::data_symbols() const {
    std::vector<int> out;
    for (int t = 0; t < num_ofdm_symbols; ++t) {
        if (!is_pilot_symbol(t)) out.push_back(t);
    }
    return out;
}

int FrameConfig::num_data_res() const {
    return (num_ofdm_symbols - static_cast<int>(pilot_symbols.size())) * num_subcarriers;
}

double FrameConfig::subcarrier_frequency(int k) const { return (k - num_subcarriers / 2) * subcarrier_spacing; }

int FrameConfig::fft_bin(int k) const { return ((k - num_subcarriers / 2) % fft_size + fft_size) % fft_size; }

std::string FrameConfig::summary() const {
    std::ostringstream os;
    os << "K=" << num_subcarriers << " fft=" << fft_size << " cp=" << cp_length << " scs=" << subcarrier_spacing
       << " mod=" << to_string(modulation) << " N=" << num_rx_antennas << " pilots=";
    for (std::size_t i = 0; i < pilot_symbols.size(); ++i) os << (i ? "/" : "") << pilot_symbols[i];
    os << " cell=" << cell_id;
    return os.str();
}

std::vector<std::uint8_t> hard_decisions(const LlrGrid& llrs) {
    std::vector<std::uint8_t> bits(llrs.llr.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = llrs.llr[i] < 0 ? 1 : 0;
    return bits;
}

std::size_t count_bit_errors(const LlrGrid& llrs, std::span<const std::uint8_t> bits) {
    if (llrs.llr.size() != bits.size()) throw ValidationError("LLR count does not match bit count");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) errors += (llrs.llr[i] < 0 ? 1 : 0) != bits[i];
    return errors;
}

ComplexVec pilot_sequence(const FrameConfig& config) {
    RngStream rng(0x50494C4F54ull ^ config.cell_id, 0);  // "PILOT"
    ComplexVec seq(static_cast<std::size_t>(config.num_subcarriers));
    const double a = std::numbers::sqrt2 / 2.0;
    for (auto& p : seq) {
        const auto bits = rng.next_u32();
        p = {(bits & 1u) ? -a : a, (bits & 2u) ? -a : a};
    }
    return seq;
}

}  // namespace hrx::phy
