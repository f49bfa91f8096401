// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "hrx/errors.hpp"
#include "hrx/phy.hpp"

using namespace hrx;
using namespace hrx::phy;

namespace {

std::vector<std::uint8_t> random_bits(RngStream& rng, std::size_t n) {
    std::vector<std::uint8_t> b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    return b;
}

// Exhaustive max-log over the whole constellation; the demapper under test
// uses per-axis minimisation instead.
std::vector<double> brute_force_maxlog(cplx z, double nv, Modulation mod) {
    const auto& pts = constellation(mod);
    const int bps = bits_per_symbol(mod);
    std::vector<double> out;
    for (int i = 0; i < bps; ++i) {
        double m0 = std::numeric_limits<double>::infinity(), m1 = m0;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const double d = std::norm(z - pts[p]);
            if ((p >> i) & 1) m1 = std::min(m1, d);
            else m0 = std::min(m0, d);
        }
        out.push_back((m1 - m0) / nv);
    }
    return out;
}

const Modulation kMods[] = {Modulation::Qam4, Modulation::Qam16, Modulation::Qam64};

}  // namespace

TEST_CASE("qam_map conventions") {
    const std::vector<std::uint8_t> zeros{0, 0};
    const cplx s = qam_map(zeros, Modulation::Qam4)[0];
    CHECK(std::abs(s - cplx(1, 1) / std::numbers::sqrt2) < 1e-15);

    for (Modulation mod : kMods) {
        const auto& pts = constellation(mod);
        double e = 0;
        for (const auto& p : pts) e += std::norm(p);
        CHECK(e / static_cast<double>(pts.size()) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(std::abs(constellation(Modulation::Qam64)[0].real() - 3 / std::sqrt(42.0)) < 1e-15);

    const std::vector<std::uint8_t> odd{0, 1, 1};
    CHECK_THROWS_AS(qam_map(odd, Modulation::Qam4), ValidationError);
}

TEST_CASE("qam: neighbouring levels differ in one bit (Gray)") {
    for (Modulation mod : kMods) {
        const auto& pts = constellation(mod);
        const double step = 2.0 * std::abs(constellation(mod)[0].real()) /
                            (std::pow(2.0, bits_per_symbol(mod) / 2) - 1);
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = 0; b < pts.size(); ++b) {
                if (std::abs(std::abs(pts[a] - pts[b]) - step) < 1e-9) CHECK(std::popcount(a ^ b) == 1);
            }
        }
    }
}

TEST_CASE("qam: exhaustive hard round trip") {
    for (Modulation mod : kMods) {
        const int bps = bits_per_symbol(mod);
        std::vector<std::uint8_t> bits;
        for (int v = 0; v < (1 << bps); ++v) {
            for (int i = 0; i < bps; ++i) bits.push_back(static_cast<std::uint8_t>((v >> i) & 1));
        }
        const auto syms = qam_map(bits, mod);
        CHECK(qam_demap_hard(syms, mod) == bits);
    }
}

TEST_CASE("qam_demap_maxlog examples") {
    const cplx p00 = cplx(1, 1) / std::numbers::sqrt2;
    const auto l = qam_demap_maxlog(p00, 1.0, Modulation::Qam4);
    REQUIRE(l.size() == 2);
    CHECK(l[0] == doctest::Approx(2.0));
    CHECK(l[1] == doctest::Approx(2.0));

    // origin is equidistant only for the sign bits; amplitude bits of 16/64-QAM are not
    for (double v : qam_demap_maxlog(0.0, 0.3, Modulation::Qam4)) CHECK(v == doctest::Approx(0.0));
    for (Modulation mod : {Modulation::Qam16, Modulation::Qam64}) {
        const auto l0 = qam_demap_maxlog(0.0, 0.3, mod);
        CHECK(l0[0] == doctest::Approx(0.0));
        CHECK(l0[1] == doctest::Approx(0.0));
    }

    const auto a = qam_demap_maxlog({0.3, -0.8}, 0.5, Modulation::Qam16);
    const auto b = qam_demap_maxlog({0.3, -0.8}, 1.0, Modulation::Qam16);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i] / 2));

    CHECK_THROWS_AS(qam_demap_maxlog(0.0, 0.0, Modulation::Qam4), ValidationError);
}

TEST_CASE("qam_demap_maxlog equals exhaustive max-log") {
    RngStream rng(8, 1);
    for (Modulation mod : kMods) {
        for (int i = 0; i < 2000; ++i) {
            const cplx z = 1.3 * rng.complex_normal();
            const double nv = 0.05 + rng.uniform();
            const auto fast = qam_demap_maxlog(z, nv, mod);
            const auto ref = brute_force_maxlog(z, nv, mod);
            for (std::size_t b = 0; b < ref.size(); ++b) CHECK(fast[b] == doctest::Approx(ref[b]).epsilon(1e-12));
        }
    }
}

TEST_CASE("demapper hard decisions equal nearest neighbour at vanishing noise") {
    RngStream rng(9, 1);
    for (Modulation mod : kMods) {
        ComplexVec z(10000);
        for (auto& v : z) v = rng.complex_normal();
        std::vector<double> llr;
        for (const auto& v : z) qam_demap_maxlog(v, 1e-9, mod, llr);
        LlrGrid g{llr};
        CHECK(hard_decisions(g) == qam_demap_hard(z, mod));
    }
}

TEST_CASE("ldpc: construction invariants") {
    const LdpcCode code(LdpcCode::Params{});
    CHECK(code.n() == 648);
    CHECK(code.k() == 324);
    CHECK(code.rank() == code.n() - code.k());
    std::vector<int> col_weight(static_cast<std::size_t>(code.n()), 0);
    for (const auto& r : code.check_rows()) {
        CHECK(r.size() == 6u);
        for (int c : r) col_weight[static_cast<std::size_t>(c)]++;
    }
    for (int w : col_weight) CHECK(w == 3);

    // same seed, same matrix
    const LdpcCode again(LdpcCode::Params{});
    CHECK(again.check_rows() == code.check_rows());
    CHECK_THROWS_AS(LdpcCode(LdpcCode::Params{10, 10, 1, 5}), ConfigError);
}

TEST_CASE("ldpc: encode examples") {
    const LdpcCode code(LdpcCode::Params{});
    const std::vector<std::uint8_t> zeros(324, 0);
    const auto cw0 = code.encode(zeros);
    CHECK(std::all_of(cw0.begin(), cw0.end(), [](auto b) { return b == 0; }));

    RngStream rng(10, 0);
    for (int i = 0; i < 100; ++i) {
        const auto info = random_bits(rng, 324);
        const auto cw = code.encode(info);
        CHECK(code.is_codeword(cw));
        CHECK(std::equal(info.begin(), info.end(), cw.begin()));
        // noise-free soft values decode straight back
        std::vector<double> llr(cw.size());
        for (std::size_t j = 0; j < cw.size(); ++j) llr[j] = cw[j] ? -4.0 : 4.0;
        const auto dec = code.decode(llr);
        CHECK(dec.converged);
        CHECK(dec.info == info);
    }
    const std::vector<std::uint8_t> short_info(10, 0);
    CHECK_THROWS_AS(code.encode(short_info), ValidationError);
}

TEST_CASE("ldpc: decode examples") {
    const LdpcCode code(LdpcCode::Params{});
    std::vector<double> strong(648, 10.0);
    auto d0 = code.decode(strong);
    CHECK(d0.converged);
    CHECK(std::all_of(d0.info.begin(), d0.info.end(), [](auto b) { return b == 0; }));

    RngStream rng(11, 0);
    const auto info = random_bits(rng, 324);
    const auto cw = code.encode(info);
    for (int flip : {0, 17, 400, 647}) {
        std::vector<double> llr(cw.size());
        for (std::size_t j = 0; j < cw.size(); ++j) llr[j] = cw[j] ? -8.0 : 8.0;
        llr[static_cast<std::size_t>(flip)] = cw[static_cast<std::size_t>(flip)] ? 2.0 : -2.0;
        const auto dec = code.decode(llr);
        CHECK(dec.converged);
        CHECK(dec.codeword == cw);
    }

    std::vector<double> noisy(648);
    for (auto& v : noisy) v = (rng.next_u32() & 1u) ? 5.0 : -5.0;
    const auto bad = code.decode(noisy);
    CHECK(bad.info.size() == 324u);
    CHECK(bad.iterations <= code.max_bp_iters());

    std::vector<double> wrong(10, 1.0);
    CHECK_THROWS_AS(code.decode(wrong), ValidationError);
}

TEST_CASE("ldpc: frame-sized codes are full rank") {
    for (Modulation mod : kMods) {
        FrameConfig cfg;
        cfg.modulation = mod;
        const auto params = code_params_for(cfg);
        CHECK(params.n == cfg.data_bits());
        const LdpcCode code(params);
        CHECK(code.k() == params.n / 2);
        if (mod == Modulation::Qam4) CHECK(code.rank() == code.n() - code.k());
    }
}

TEST_CASE("build_grid examples") {
    FrameConfig cfg;
    CHECK(cfg.num_data_res() == 12 * 64);
    RngStream rng(12, 0);
    const auto pilots = pilot_sequence(cfg);
    for (const auto& p : pilots) CHECK(std::abs(std::abs(p) - 1.0) < 1e-15);

    double energy = 0;
    for (int g = 0; g < 100; ++g) {
        const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.data_bits()));
        const auto tx = build_grid(bits, cfg);
        for (int t : cfg.pilot_symbols) {
            for (int k = 0; k < cfg.num_subcarriers; ++k) CHECK(tx.grid.at(0, t, k) == pilots[static_cast<std::size_t>(k)]);
        }
        for (const auto& v : tx.grid.samples()) energy += std::norm(v);
        CHECK(tx.data_symbols.size() == static_cast<std::size_t>(cfg.num_data_res()));
    }
    energy /= 100.0 * 14 * 64;
    CHECK(energy == doctest::Approx(1.0).epsilon(0.02));

    const std::vector<std::uint8_t> short_bits(100, 0);
    CHECK_THROWS_AS(build_grid(short_bits, cfg), ValidationError);
}

TEST_CASE("ofdm: round trip, symbol length and delay phase ramp") {
    FrameConfig cfg;
    RngStream rng(13, 0);
    ResourceGrid g(2, 14, cfg.num_subcarriers);
    for (auto& v : g.samples()) v = rng.complex_normal();
    const auto td = ofdm_modulate(g, cfg);
    CHECK(td[0].size() == static_cast<std::size_t>(14 * (cfg.fft_size + cfg.cp_length)));
    CHECK(ofdm_symbol_length(cfg) == 144);
    const auto back = ofdm_demodulate(td, cfg);
    double err = 0;
    for (std::size_t i = 0; i < g.samples().size(); ++i) err = std::max(err, std::abs(back.samples()[i] - g.samples()[i]));
    CHECK(err < 1e-9);

    // a pure delay inside the cyclic prefix becomes a per-subcarrier phase ramp
    for (int d : {1, 5, 15}) {
        std::vector<ComplexVec> delayed(td.size(), ComplexVec(td[0].size()));
        for (std::size_t a = 0; a < td.size(); ++a) {
            for (std::size_t i = static_cast<std::size_t>(d); i < td[a].size(); ++i) delayed[a][i] = td[a][i - static_cast<std::size_t>(d)];
        }
        const auto rx = ofdm_demodulate(delayed, cfg);
        double worst = 0;
        for (int a = 0; a < 2; ++a) {
            for (int t = 0; t < 14; ++t) {
                for (int k = 0; k < cfg.num_subcarriers; ++k) {
                    const double f = (k - cfg.num_subcarriers / 2) / static_cast<double>(cfg.fft_size);
                    const cplx expect = g.at(a, t, k) * std::polar(1.0, -2.0 * std::numbers::pi * f * d);
                    worst = std::max(worst, std::abs(rx.at(a, t, k) - expect));
                }
            }
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("frame config validation") {
    FrameConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.fft_size = 96;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = FrameConfig{};
    cfg.pilot_symbols = {2, 14};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = FrameConfig{};
    cfg.num_subcarriers = 256;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(parse_modulation("QAM64") == Modulation::Qam64);
    CHECK_THROWS_AS(parse_modulation("qam8"), ConfigError);
}
