// SPDX-License-Identifier: Apache-2.0
#include "hrx/phy/qam.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "hrx/errors.hpp"

namespace hrx::phy {

namespace {

int axis_bits(Modulation mod) { return bits_per_symbol(mod) / 2; }

double norm_factor(Modulation mod) {
    switch (mod) {
        case Modulation::Qam4: return std::sqrt(2.0);
        case Modulation::Qam16: return std::sqrt(10.0);
        case Modulation::Qam64: return std::sqrt(42.0);
    }
    return 1.0;
}

// Gray PAM level (unnormalized, odd integers) for the axis bits c0, c1, ...
// level = (1-2c0) * (2^{m-1} - (1-2c1) * (2^{m-2} - ...)).
int pam_level(const int* c, int m) {
    int inner = 1;
    for (int i = m - 1; i >= 1; --i) inner = (1 << (m - i)) - (1 - 2 * c[i]) * inner;
    return (1 - 2 * c[0]) * inner;
}

struct AxisTable {
    int m = 0;
    double scale = 1.0;
    std::vector<double> level;              // indexed by axis-bit pattern
    std::vector<std::array<int, 3>> bits;   // axis bits per pattern
};

const AxisTable& axis_table(Modulation mod) {
    static const auto build = [](Modulation md) {
        AxisTable t;
        t.m = axis_bits(md);
        t.scale = 1.0 / norm_factor(md);
        for (int p = 0; p < (1 << t.m); ++p) {
            std::array<int, 3> c{};
            for (int i = 0; i < t.m; ++i) c[static_cast<std::size_t>(i)] = (p >> i) & 1;
            t.level.push_back(pam_level(c.data(), t.m) * t.scale);
            t.bits.push_back(c);
        }
        return t;
    };
    static const AxisTable q4 = build(Modulation::Qam4);
    static const AxisTable q16 = build(Modulation::Qam16);
    static const AxisTable q64 = build(Modulation::Qam64);
    switch (mod) {
        case Modulation::Qam4: return q4;
        case Modulation::Qam16: return q16;
        case Modulation::Qam64: return q64;
    }
    return q4;
}

}  // namespace

ComplexVec qam_map(std::span<const std::uint8_t> bits, Modulation mod) {
    const int bps = bits_per_symbol(mod);
    if (bits.size() % static_cast<std::size_t>(bps) != 0) {
        throw ValidationError("qam_map: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                              std::to_string(bps));
    }
    const AxisTable& tab = axis_table(mod);
    ComplexVec out(bits.size() / static_cast<std::size_t>(bps));
    for (std::size_t s = 0; s < out.size(); ++s) {
        const std::uint8_t* b = bits.data() + s * static_cast<std::size_t>(bps);
        int pi = 0, pq = 0;
        for (int i = 0; i < tab.m; ++i) {
            if (b[2 * i] > 1 || b[2 * i + 1] > 1) throw ValidationError("qam_map: bits must be 0 or 1");
            pi |= b[2 * i] << i;
            pq |= b[2 * i + 1] << i;
        }
        out[s] = {tab.level[static_cast<std::size_t>(pi)], tab.level[static_cast<std::size_t>(pq)]};
    }
    return out;
}

const ComplexVec& constellation(Modulation mod) {
    static const auto build = [](Modulation md) {
        const int bps = bits_per_symbol(md);
        ComplexVec pts;
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(bps));
        for (int v = 0; v < (1 << bps); ++v) {
            for (int i = 0; i < bps; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((v >> i) & 1);
            pts.push_back(qam_map(bits, md)[0]);
        }
        return pts;
    };
    static const ComplexVec q4 = build(Modulation::Qam4);
    static const ComplexVec q16 = build(Modulation::Qam16);
    static const ComplexVec q64 = build(Modulation::Qam64);
    switch (mod) {
        case Modulation::Qam4: return q4;
        case Modulation::Qam16: return q16;
        case Modulation::Qam64: return q64;
    }
    return q4;
}

void qam_demap_maxlog(cplx z, double noise_var, Modulation mod, std::vector<double>& out) {
    if (!(noise_var > 0)) throw ValidationError("qam_demap_maxlog: noise_var must be positive");
    // The constellation is a product of two Gray PAM axes, so the max-log
    // minimisation separates: the other axis contributes equally to both terms.
    const AxisTable& tab = axis_table(mod);
    const std::size_t base = out.size();
    out.resize(base + static_cast<std::size_t>(2 * tab.m));
    for (int axis = 0; axis < 2; ++axis) {
        const double v = axis == 0 ? z.real() : z.imag();
        std::array<double, 3> min0, min1;
        min0.fill(std::numeric_limits<double>::infinity());
        min1.fill(std::numeric_limits<double>::infinity());
        for (std::size_t p = 0; p < tab.level.size(); ++p) {
            const double d = (v - tab.level[p]) * (v - tab.level[p]);
            for (int i = 0; i < tab.m; ++i) {
                auto& slot = tab.bits[p][static_cast<std::size_t>(i)] ? min1 : min0;
                if (d < slot[static_cast<std::size_t>(i)]) slot[static_cast<std::size_t>(i)] = d;
            }
        }
        for (int i = 0; i < tab.m; ++i) {
            out[base + static_cast<std::size_t>(2 * i + axis)] =
                (min1[static_cast<std::size_t>(i)] - min0[static_cast<std::size_t>(i)]) / noise_var;
        }
    }
}

std::vector<double> qam_demap_maxlog(cplx z, double noise_var, Modulation mod) {
    std::vector<double> out;
    qam_demap_maxlog(z, noise_var, mod, out);
    return out;
}

std::vector<std::uint8_t> qam_demap_hard(std::span<const cplx> symbols, Modulation mod) {
    const ComplexVec& pts = constellation(mod);
    const int bps = bits_per_symbol(mod);
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(bps));
    for (const cplx& z : symbols) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double d = std::norm(z - pts[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        for (int i = 0; i < bps; ++i) bits.push_back(static_cast<std::uint8_t>((best >> i) & 1));
    }
    return bits;
}

}  // namespace hrx::phy
