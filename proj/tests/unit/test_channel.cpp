// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hrx/channel.hpp"
#include "hrx/errors.hpp"
#include "hrx/phy.hpp"

using namespace hrx;
using namespace hrx::channel;
using phy::FrameConfig;
using phy::ResourceGrid;

namespace {

ResourceGrid random_tx(const FrameConfig& cfg, RngStream& rng) {
    ResourceGrid g(1, cfg.num_ofdm_symbols, cfg.num_subcarriers);
    for (auto& v : g.samples()) v = rng.complex_normal();
    return g;
}

ChannelProfile sample_spaced_profile(const FrameConfig& cfg, std::vector<int> samples, std::vector<double> powers) {
    ChannelProfile p;
    p.model = "test";
    double total = 0;
    for (double w : powers) total += w;
    for (std::size_t i = 0; i < samples.size(); ++i) p.pdp.push_back({samples[i] / cfg.sample_rate(), powers[i] / total});
    p.rms_delay_spread = rms_delay_spread(p.pdp);
    return p;
}

}  // namespace

TEST_CASE("registry: 18 normalised profiles within the cyclic prefix") {
    const auto& reg = profile_registry();
    REQUIRE(reg.size() == 18u);
    const double cp = FrameConfig{}.cp_duration();
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const auto& p = reg[i];
        CHECK(p.index == static_cast<int>(i));
        double sum = 0;
        for (const auto& t : p.pdp) {
            sum += t.power;
            CHECK(t.delay >= 0.0);
            CHECK(t.delay <= cp);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        CHECK(rms_delay_spread(p.pdp) == doctest::Approx(p.rms_delay_spread).epsilon(0.01));
        CHECK_FALSE(p.anomalous);
    }
    CHECK(reg[3].rms_delay_spread == doctest::Approx(300e-9));
    CHECK(reg[13].spatial_corr == 0.9);
    CHECK(reg[16].doppler_coherence == 0.8);
    CHECK_THROWS_AS(registry_profile(18), ConfigError);
}

TEST_CASE("registry: index 3 spread from the weighted second moment") {
    const auto& p = registry_profile(3);
    double m0 = 0, m1 = 0, m2 = 0;
    for (const auto& t : p.pdp) {
        m0 += t.power;
        m1 += t.power * t.delay;
        m2 += t.power * t.delay * t.delay;
    }
    const double rms = std::sqrt(m2 / m0 - (m1 / m0) * (m1 / m0));
    CHECK(rms == doctest::Approx(p.rms_delay_spread).epsilon(0.01));
}

TEST_CASE("registry: serialisation and hash are stable") {
    CHECK(serialize_registry() == serialize_registry());
    const auto h = registry_hash();
    CHECK(h == registry_hash());
    // rebuilding a profile from the tables gives the same taps
    const auto again = make_tdl('B', 300e-9, FrameConfig{}.cp_duration());
    REQUIRE(again.pdp.size() == registry_profile(4).pdp.size());
    for (std::size_t i = 0; i < again.pdp.size(); ++i) CHECK(again.pdp[i].delay == registry_profile(4).pdp[i].delay);
    const auto table = serialize_registry();
    CHECK(std::count(table.begin(), table.end(), '\n') == 19);
}

TEST_CASE("anomaly_profile") {
    const auto same = anomaly_profile(4, 1.0);
    CHECK_FALSE(same.anomalous);
    CHECK(same.pdp.size() == registry_profile(4).pdp.size());
    for (std::size_t i = 0; i < same.pdp.size(); ++i) CHECK(same.pdp[i].delay == registry_profile(4).pdp[i].delay);

    const auto a = anomaly_profile(4, 5.0);
    CHECK(a.anomalous);
    CHECK(rms_delay_spread(a.pdp) == doctest::Approx(5 * rms_delay_spread(registry_profile(4).pdp)).epsilon(0.01));
    CHECK_THROWS_AS(anomaly_profile(4, 0.5), ConfigError);

    const FrameConfig cfg;
    RngStream rng(3, 0);
    const auto h = realize(a, cfg, rng);
    CHECK(h.time_domain);
    for (double d : h.tap_delays) CHECK(std::abs(d * cfg.sample_rate() - std::round(d * cfg.sample_rate())) < 1e-9);
}

TEST_CASE("realize: flat fading limit") {
    FrameConfig cfg;
    cfg.num_rx_antennas = 1;
    RngStream rng(4, 0);
    int below_one = 0;
    const int trials = 10000;
    double power = 0;
    for (int i = 0; i < trials; ++i) {
        const auto h = realize(flat_profile(), cfg, rng);
        const cplx h0 = h.freq_response.at(0, 0, 0);
        if (i < 50)
            for (const auto& v : h.freq_response.samples()) REQUIRE(std::abs(v - h0) < 1e-15);
        power += std::norm(h0);
        below_one += std::norm(h0) < 1.0;
    }
    CHECK(power / trials == doctest::Approx(1.0).epsilon(0.03));
    // |H|^2 is exponential: P(|H|^2 < 1) = 1 - 1/e
    CHECK(below_one / static_cast<double>(trials) == doctest::Approx(1 - std::exp(-1.0)).epsilon(0.025));
}

TEST_CASE("realize: two-path frequency correlation has nulls spaced 1/tau") {
    FrameConfig cfg;
    cfg.num_rx_antennas = 1;
    // tau = 1/(16 df): correlation magnitude vanishes at 8 subcarriers and returns at 16
    const double tau = 1.0 / (16 * cfg.subcarrier_spacing);
    ChannelProfile p;
    p.model = "two-path";
    p.pdp = {{0.0, 0.5}, {tau, 0.5}};
    RngStream rng(5, 0);
    const int trials = 10000;
    std::vector<cplx> corr(33);
    double mean_power = 0;
    for (int i = 0; i < trials; ++i) {
        const auto h = realize(p, cfg, rng);
        for (int d = 0; d <= 32; ++d) corr[static_cast<std::size_t>(d)] += h.freq_response.at(0, 0, 10) * std::conj(h.freq_response.at(0, 0, 10 + d));
        for (int k = 0; k < cfg.num_subcarriers; ++k) mean_power += std::norm(h.freq_response.at(0, 0, k));
    }
    for (auto& c : corr) c /= trials;
    mean_power /= trials * cfg.num_subcarriers;
    // R(d) = 0.5 + 0.5 exp(j 2 pi d df tau), |R(d)| = |cos(pi d df tau)|
    for (int d = 0; d <= 32; ++d) {
        const double expect = std::abs(std::cos(std::numbers::pi * d * cfg.subcarrier_spacing * tau));
        CHECK(std::abs(corr[static_cast<std::size_t>(d)]) == doctest::Approx(expect).epsilon(0.05).scale(1.0));
    }
    CHECK(std::abs(corr[8]) < 0.05);
    CHECK(std::abs(corr[24]) < 0.05);
    CHECK(std::abs(corr[16]) > 0.95);
    CHECK(mean_power == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("realize: time variation, spatial correlation, energy") {
    const FrameConfig cfg;
    RngStream rng(6, 0);
    for (int idx = 0; idx < kNumProfiles; ++idx) {
        const auto& p = registry_profile(idx);
        double power = 0;
        cplx cross{};
        double p0 = 0, p1 = 0;
        cplx tcorr{};
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            const auto h = realize(p, cfg, rng);
            const auto& H = h.freq_response;
            if (p.doppler_coherence == 1.0 && i < 50) {
                for (int a = 0; a < 2; ++a)
                    for (int t = 1; t < 14; ++t)
                        for (int k = 0; k < 64; ++k) REQUIRE(H.at(a, t, k) == H.at(a, 0, k));
            }
            double s = 0;
            for (const auto& v : H.samples()) s += std::norm(v);
            power += s / static_cast<double>(H.samples().size());
            cross += H.at(0, 5, 20) * std::conj(H.at(1, 5, 20));
            p0 += std::norm(H.at(0, 5, 20));
            p1 += std::norm(H.at(1, 5, 20));
            tcorr += H.at(0, 6, 20) * std::conj(H.at(0, 7, 20));
        }
        CAPTURE(idx);
        const double mean = power / trials;
        CHECK(mean >= 0.97);
        CHECK(mean <= 1.03);
        const double rho = std::abs(cross) / std::sqrt(p0 * p1);
        CHECK(std::abs(rho - p.spatial_corr) < 0.03);
        CHECK(std::abs(std::abs(tcorr) / p0 - p.doppler_coherence) < 0.03);
    }
}

TEST_CASE("realize is deterministic per stream") {
    const FrameConfig cfg;
    RngStream a(7, 3), b(7, 3);
    const auto ha = realize(registry_profile(16), cfg, a);
    const auto hb = realize(registry_profile(16), cfg, b);
    CHECK(ha.freq_response.samples() == hb.freq_response.samples());
}

TEST_CASE("apply: unit channel without noise is the identity") {
    const FrameConfig cfg;
    RngStream rng(8, 0);
    auto h = realize(flat_profile(), cfg, rng);
    for (auto& v : h.freq_response.samples()) v = 1.0;
    const auto tx = random_tx(cfg, rng);
    const auto rx = apply(tx, h, std::numeric_limits<double>::infinity(), cfg, rng);
    for (int a = 0; a < 2; ++a)
        for (int t = 0; t < 14; ++t)
            for (int k = 0; k < 64; ++k) CHECK(rx.at(a, t, k) == tx.at(0, t, k));
    CHECK(noise_variance(10.0) == doctest::Approx(0.1));
}

TEST_CASE("apply: noise power per RE") {
    const FrameConfig cfg;
    RngStream rng(9, 0);
    auto h = realize(flat_profile(), cfg, rng);
    for (auto& v : h.freq_response.samples()) v = 0.0;
    ResourceGrid tx(1, 14, 64);
    double p = 0;
    std::size_t n = 0;
    while (n < 100000) {
        const auto rx = apply(tx, h, 10.0, cfg, rng);
        for (const auto& v : rx.samples()) p += std::norm(v);
        n += rx.samples().size();
    }
    CHECK(p / static_cast<double>(n) == doctest::Approx(0.1).epsilon(0.01));
}

TEST_CASE("apply: per-RE path equals time-domain convolution for sample-spaced taps") {
    const FrameConfig cfg;
    RngStream rng(10, 0);
    auto p = sample_spaced_profile(cfg, {0, 3, 7, 16}, {1.0, 0.5, 0.25, 0.1});
    for (double rho_t : {1.0, 0.8}) {
        p.doppler_coherence = rho_t;
        const auto h = realize(p, cfg, rng);
        const auto tx = random_tx(cfg, rng);
        const auto freq = apply(tx, h, std::numeric_limits<double>::infinity(), cfg, rng);
        const auto time = apply_time_domain(tx, h, cfg);
        double worst = 0;
        for (std::size_t i = 0; i < freq.samples().size(); ++i) worst = std::max(worst, std::abs(freq.samples()[i] - time.samples()[i]));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("apply: errors") {
    const FrameConfig cfg;
    RngStream rng(11, 0);
    const auto h = realize(registry_profile(0), cfg, rng);
    ResourceGrid wrong(1, 14, 32);
    CHECK_THROWS_AS(apply(wrong, h, 10.0, cfg, rng), ValidationError);
    ResourceGrid two_port(2, 14, 64);
    CHECK_THROWS_AS(apply(two_port, h, 10.0, cfg, rng), ValidationError);

    auto far = sample_spaced_profile(cfg, {0, 40}, {1, 1});
    CHECK_THROWS_AS(realize(far, cfg, rng), ConfigError);
}

TEST_CASE("channel ids") {
    CHECK(parse_channel_id("7") == ChannelId{7, 1.0});
    CHECK(parse_channel_id("a4x5") == ChannelId{4, 5.0});
    CHECK(parse_channel_id("a4x5").str() == "a4x5");
    CHECK(parse_channel_id("13").str() == "13");
    CHECK(profile_for(parse_channel_id("a4x5")).anomalous);
    CHECK(parse_channel_id("awgn").str() == "awgn");
    CHECK(parse_channel_id("flat").index == ChannelId::kFlat);
    RngStream rng(12, 0);
    const auto h = realize(profile_for(parse_channel_id("awgn")), FrameConfig{}, rng);
    for (const auto& v : h.freq_response.samples()) CHECK(v == cplx(1.0));
    for (const char* bad : {"", "18", "-1", "a4", "a4x0.5", "4x", "x", "3.5"}) CHECK_THROWS_AS(parse_channel_id(bad), ConfigError);
}
