// SPDX-License-Identifier: Apache-2.0
#include "hrx/harness/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "hrx/channel.hpp"
#include "hrx/errors.hpp"
#include "hrx/nn.hpp"
#include "hrx/nn/gradcheck.hpp"
#include "hrx/phy/ofdm.hpp"
#include "hrx/rx/traditional.hpp"

namespace hrx::harness {

namespace {

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }
double from_db(double x) { return std::pow(10.0, x / 10.0); }

/// Batch-means estimate: bits within a block are correlated through the
/// shared channel, so the standard error uses per-block error rates.
struct BerEstimate {
    double errors = 0, bits = 0, sum_sq = 0;
    int blocks = 0;
    void add(std::size_t e, std::size_t n) {
        errors += static_cast<double>(e);
        bits += static_cast<double>(n);
        const double r = static_cast<double>(e) / static_cast<double>(n);
        sum_sq += r * r;
        ++blocks;
    }
    double ber() const { return errors / bits; }
    double standard_error() const {
        const double m = ber();
        const double var = (sum_sq / blocks - m * m) * blocks / (blocks - 1.0);
        return std::sqrt(std::max(var, 0.0) / blocks);
    }
};

std::vector<std::uint8_t> random_bits(RngStream& rng, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    return bits;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

template <class Fn>
OracleResult timed(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    OracleResult r;
    try {
        r = fn();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

OracleResult oracle_awgn() {
    return timed("awgn-qfunction", [] {
        phy::FrameConfig cfg;
        cfg.num_rx_antennas = 1;
        RngStream init(1, 1);
        auto h = channel::realize(channel::awgn_profile(), cfg, init);
        RngStream rng(26, 0);
        OracleResult r{"", true, "", 0};
        for (double ebn0 : {2.0, 4.0, 6.0}) {
            const double snr = ebn0 + 10 * std::log10(2.0);
            BerEstimate est;
            while (est.bits < 1e5) {
                const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.data_bits()));
                const auto tx = phy::build_grid(bits, cfg);
                const auto rx = channel::apply(tx.grid, h, snr, cfg, rng);
                est.add(phy::count_bit_errors(rx::perfect_csi_receive(rx, h.freq_response, cfg, channel::noise_variance(snr)), bits),
                        bits.size());
            }
            const double expect = qfunc(std::sqrt(2 * from_db(ebn0)));
            const double z = std::abs(est.ber() - expect) / est.standard_error();
            r.pass = r.pass && z < 3;
            r.detail += fmt("%gdB %.3e/%.3e ", ebn0, est.ber(), expect) + fmt("(%.1f se) ", z);
        }
        return r;
    });
}

OracleResult oracle_rayleigh() {
    return timed("rayleigh-closed-form", [] {
        phy::FrameConfig cfg;
        cfg.num_rx_antennas = 1;
        RngStream rng(27, 0);
        OracleResult r{"", true, "", 0};
        for (double gamma_db : {5.0, 10.0, 15.0}) {
            const double snr = gamma_db + 10 * std::log10(2.0);
            BerEstimate est;
            for (int b = 0; b < 4000; ++b) {
                const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.data_bits()));
                const auto tx = phy::build_grid(bits, cfg);
                const auto h = channel::realize(channel::flat_profile(), cfg, rng);
                const auto rx = channel::apply(tx.grid, h, snr, cfg, rng);
                est.add(phy::count_bit_errors(rx::perfect_csi_receive(rx, h.freq_response, cfg, channel::noise_variance(snr)), bits),
                        bits.size());
            }
            const double g = from_db(gamma_db);
            const double expect = 0.5 * (1 - std::sqrt(g / (1 + g)));
            const double z = std::abs(est.ber() - expect) / est.standard_error();
            r.pass = r.pass && z < 3;
            r.detail += fmt("%gdB %.3e/%.3e ", gamma_db, est.ber(), expect) + fmt("(%.1f se) ", z);
        }
        return r;
    });
}

OracleResult oracle_ls() {
    return timed("ls-exactness", [] {
        phy::FrameConfig cfg;
        const auto pilots = phy::pilot_sequence(cfg);
        RngStream rng(21, 0);
        double worst = 0;
        for (int i = 0; i < 18; ++i) {
            const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.data_bits()));
            const auto tx = phy::build_grid(bits, cfg);
            const auto h = channel::realize(channel::registry_profile(i), cfg, rng);
            const auto rx = channel::apply(tx.grid, h, std::numeric_limits<double>::infinity(), cfg, rng);
            const auto est = rx::ls_estimate(rx, pilots, cfg);
            for (int a = 0; a < cfg.num_rx_antennas; ++a)
                for (std::size_t p = 0; p < cfg.pilot_symbols.size(); ++p)
                    for (int k = 0; k < cfg.num_subcarriers; ++k)
                        worst = std::max(worst, std::abs(est.at(a, static_cast<int>(p), k) -
                                                         h.freq_response.at(a, cfg.pilot_symbols[p], k)));
        }
        const double snr = 7.0, n0 = channel::noise_variance(snr);
        double err = 0, n = 0;
        for (int r = 0; r < 10000; ++r) {
            const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.data_bits()));
            const auto tx = phy::build_grid(bits, cfg);
            const auto h = channel::realize(channel::registry_profile(r % 18), cfg, rng);
            const auto rx = channel::apply(tx.grid, h, snr, cfg, rng);
            const auto est = rx::ls_estimate(rx, pilots, cfg);
            for (int a = 0; a < cfg.num_rx_antennas; ++a)
                for (std::size_t p = 0; p < cfg.pilot_symbols.size(); ++p)
                    for (int k = 0; k < cfg.num_subcarriers; ++k) {
                        err += std::norm(est.at(a, static_cast<int>(p), k) - h.freq_response.at(a, cfg.pilot_symbols[p], k));
                        n += 1;
                    }
        }
        const double ratio = err / n / n0;
        return OracleResult{"", worst <= 1e-12 && std::abs(ratio - 1) <= 0.02,
                            fmt("noise-free max error %.2e, error variance / N0 = %.4f", worst, ratio), 0};
    });
}

OracleResult oracle_lmmse() {
    return timed("lmmse-identity", [] {
        RngStream rng(23, 0);
        double worst = 0;
        for (int i = 0; i < 10000; ++i) {
            const int n = 1 + static_cast<int>(rng.below(4));
            std::vector<cplx> h(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
            for (auto& v : h) v = rng.complex_normal();
            for (auto& v : y) v = rng.complex_normal();
            const double nv = 0.01 + 2 * rng.uniform();
            const auto eq = rx::lmmse_equalize(y, h, nv);
            cplx hy{};
            double hh = 0;
            for (std::size_t a = 0; a < h.size(); ++a) {
                hy += std::conj(h[a]) * y[a];
                hh += std::norm(h[a]);
            }
            worst = std::max(worst, std::abs(eq.z - hy / hh) / std::max(1.0, std::abs(hy / hh)));
        }
        phy::FrameConfig cfg;
        bool ordered = true;
        std::string detail = fmt("max |LMMSE - MRC| %.2e; perfect/LS errors:", worst);
        for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
            std::size_t e_ls = 0, e_pc = 0;
            for (int b = 0; b < 1000; ++b) {
                const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.data_bits()));
                const auto tx = phy::build_grid(bits, cfg);
                const auto h = channel::realize(channel::registry_profile(b % 18), cfg, rng);
                const auto rx = channel::apply(tx.grid, h, snr, cfg, rng);
                const double nv = channel::noise_variance(snr);
                e_ls += phy::count_bit_errors(rx::traditional_receive(rx, cfg, nv), bits);
                e_pc += phy::count_bit_errors(rx::perfect_csi_receive(rx, h.freq_response, cfg, nv), bits);
            }
            ordered = ordered && e_pc <= e_ls;
            detail += fmt(" %gdB %.0f/%.0f", snr, static_cast<double>(e_pc), static_cast<double>(e_ls));
        }
        return OracleResult{"", worst <= 1e-9 && ordered, detail, 0};
    });
}

OracleResult oracle_gradients() {
    return timed("gradient-check", [] {
        using namespace nn;
        using gradcheck::random_tensor;
        constexpr int kShapes = 20;
        const double fine = gradcheck::kDouble ? 1e-5 : 1e-2;
        // ops linear in each input have exact central differences at any step;
        // a wide step keeps float rounding out of the numeric side
        const double linear = gradcheck::kDouble ? 1e-5 : 0.5;
        RngStream rng(101, 0);
        auto dim = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
        std::vector<std::pair<std::string, double>> worst{{"conv2d", 0}, {"dense", 0}, {"batch_norm", 0},
                                                          {"relu", 0},   {"sigmoid", 0}, {"add", 0},
                                                          {"reshape", 0}, {"gather", 0}, {"bce", 0}};
        auto note = [&](std::size_t i, const std::vector<double>& errs) {
            for (double e : errs) worst[i].second = std::max(worst[i].second, e);
        };
        for (int s = 0; s < kShapes; ++s) {
            {
                const int n = dim(1, 2), h = dim(1, 5), w = dim(1, 6), ci = dim(1, 3), co = dim(1, 3);
                const int kh = 2 * dim(0, 1) + 1, kw = 2 * dim(0, 1) + 1;
                Tensor in = random_tensor({n, h, w, ci}, rng), k = random_tensor({kh, kw, ci, co}, rng),
                       b = random_tensor({co}, rng);
                note(0, gradcheck::check([&] { return conv2d(in, k, b); }, {in, k, b}, rng, linear));
            }
            {
                const int n = dim(1, 4), f = dim(1, 7), u = dim(1, 5);
                Tensor x = random_tensor({n, f}, rng), w = random_tensor({f, u}, rng), b = random_tensor({u}, rng);
                note(1, gradcheck::check([&] { return dense(x, w, b); }, {x, w, b}, rng, linear));
            }
            {
                const int n = dim(2, 3), h = dim(1, 3), w = dim(1, 4), c = dim(1, 3);
                Tensor x = random_tensor({n, h, w, c}, rng);
                LayerParams p;
                p.add_batch_norm("bn", c);
                for (auto& v : p.at("bn.gamma").data()) v = static_cast<Real>(1 + 0.3 * rng.normal());
                for (auto& v : p.at("bn.beta").data()) v = static_cast<Real>(rng.normal());
                for (auto& v : p.at("bn.running_var").data()) v = static_cast<Real>(0.5 + rng.uniform());
                auto bn = p.batch_norm("bn", Real(0.99), Real(1e-5));
                const auto mode = s % 2 == 0 ? BatchNormMode::Train : BatchNormMode::Eval;
                note(2, gradcheck::check([&] { return batch_norm(x, bn, mode); }, {x, bn.gamma, bn.beta}, rng,
                                         gradcheck::kDouble ? 1e-5 : 2e-3));
            }
            {
                const int n = dim(1, 3), f = dim(1, 6);
                Tensor a = random_tensor({n, f}, rng, true, 1.0, 0.05), b = random_tensor({n, f}, rng);
                note(3, gradcheck::check([&] { return relu(a); }, {a}, rng, gradcheck::kDouble ? 1e-6 : 1e-2));
                note(4, gradcheck::check([&] { return sigmoid(a); }, {a}, rng, fine));
                note(5, gradcheck::check([&] { return add(a, b); }, {a, b}, rng, linear));
                note(6, gradcheck::check([&] { return flatten(reshape(a, {1, n * f})); }, {a}, rng, linear));
                std::vector<std::uint32_t> idx;
                for (int i = 0; i < n * f; i += 2) idx.push_back(static_cast<std::uint32_t>(i));
                idx.push_back(0);
                note(7, gradcheck::check([&] { return gather(a, idx); }, {a}, rng, linear));
                Tensor t({n, f});
                for (auto& v : t.data()) v = static_cast<Real>(rng.below(2));
                note(8, gradcheck::check([&] { return bce_with_logits(b, t); }, {b}, rng, fine));
            }
        }
        OracleResult r{"", true, "", 0};
        for (const auto& [name, e] : worst) {
            r.pass = r.pass && e < gradcheck::kTolerance;
            r.detail += name + fmt(" %.1e ", e);
        }
        r.detail += "(" + std::to_string(kShapes) + fmt(" shapes each, tolerance %.0e)", gradcheck::kTolerance);
        return r;
    });
}

OracleResult oracle_ldpc() {
    return timed("ldpc", [] {
        const phy::LdpcCode code(phy::LdpcCode::Params{});
        RngStream rng(11, 0);
        int exact = 0;
        for (int w = 0; w < 100; ++w) {
            const auto info = random_bits(rng, static_cast<std::size_t>(code.k()));
            const auto cw = code.encode(info);
            std::vector<double> llr(cw.size());
            for (std::size_t j = 0; j < cw.size(); ++j) llr[j] = cw[j] ? -10.0 : 10.0;
            exact += code.decode(llr).info == info;
        }
        // one bit with a weak, wrong-signed LLR among strong correct ones
        const auto info = random_bits(rng, static_cast<std::size_t>(code.k()));
        const auto cw = code.encode(info);
        std::vector<double> llr(cw.size());
        for (std::size_t j = 0; j < cw.size(); ++j) llr[j] = cw[j] ? -8.0 : 8.0;
        llr[17] = cw[17] ? 2.0 : -2.0;
        const bool weak_fixed = code.decode(llr).codeword == cw;

        phy::FrameConfig cfg;
        const phy::LdpcCode frame_code(phy::code_params_for(cfg));
        RngStream init(1, 1);
        const auto h = channel::realize(channel::awgn_profile(), cfg, init);
        std::size_t coded_err = 0, coded_bits = 0, raw_err = 0, raw_bits = 0;
        for (int b = 0; b < 200; ++b) {
            const auto tx = phy::make_transmission(frame_code, cfg, rng);
            const auto rx = channel::apply(tx.frame.grid, h, 6.0, cfg, rng);
            const auto l = rx::perfect_csi_receive(rx, h.freq_response, cfg, channel::noise_variance(6.0));
            raw_err += phy::count_bit_errors(l, tx.frame.bits);
            raw_bits += tx.frame.bits.size();
            const auto dec = frame_code.decode(std::span<const double>(l.llr).first(static_cast<std::size_t>(frame_code.n())));
            for (std::size_t i = 0; i < tx.info_bits.size(); ++i) coded_err += dec.info[i] != tx.info_bits[i];
            coded_bits += tx.info_bits.size();
        }
        const double coded = static_cast<double>(coded_err) / static_cast<double>(coded_bits);
        const double raw = static_cast<double>(raw_err) / static_cast<double>(raw_bits);
        return OracleResult{"", exact == 100 && weak_fixed && coded < raw,
                            "round trip " + std::to_string(exact) + "/100, weak bit " + (weak_fixed ? "fixed" : "NOT fixed") +
                                fmt(", 6 dB coded %.2e vs uncoded %.2e", coded, raw),
                            0};
    });
}

const std::vector<NamedOracle>& oracle_suite() {
    static const std::vector<NamedOracle> suite{
        {"awgn-qfunction", oracle_awgn}, {"rayleigh-closed-form", oracle_rayleigh}, {"ls-exactness", oracle_ls},
        {"lmmse-identity", oracle_lmmse}, {"gradient-check", oracle_gradients},     {"ldpc", oracle_ldpc},
    };
    return suite;
}

std::string format_oracle(const OracleResult& r) {
    return std::string(r.pass ? "PASS " : "FAIL ") + r.name + fmt(" (%.1f s): ", r.seconds) + r.detail;
}

}  // namespace hrx::harness
