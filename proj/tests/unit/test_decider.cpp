// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hrx/channel.hpp"
#include "hrx/decider/dataset.hpp"
#include "hrx/errors.hpp"
#include "hrx/rx/traditional.hpp"
#include "sim_helpers.hpp"

using namespace hrx;
using namespace hrx::decider;
using phy::FrameConfig;

namespace {

/// Returns a fixed LLR grid and counts calls.
class ProbeReceiver : public Receiver {
public:
    explicit ProbeReceiver(phy::LlrGrid out) : out_(std::move(out)) {}
    phy::LlrGrid receive(const phy::ResourceGrid&, const FrameConfig&, double) override {
        ++calls;
        return out_;
    }
    int calls = 0;

private:
    phy::LlrGrid out_;
};

class ProbeEnhancer : public Enhancer {
public:
    explicit ProbeEnhancer(phy::LlrGrid out) : out_(std::move(out)) {}
    phy::LlrGrid enhance(const phy::ResourceGrid&, const FrameConfig&, double, const phy::LlrGrid&) override {
        ++calls;
        return out_;
    }
    int calls = 0;

private:
    phy::LlrGrid out_;
};

class ConstDisc : public Discriminator {
public:
    ConstDisc(double u, DiscConfig cfg = {}) : u_(u), cfg_(cfg) {}
    const DiscConfig& config() const override { return cfg_; }
    double u(const nn::Tensor&) override {
        ++calls;
        return u_;
    }
    int calls = 0;

private:
    double u_;
    DiscConfig cfg_;
};

phy::LlrGrid constant_llrs(const FrameConfig& frame, double v) {
    return {std::vector<double>(static_cast<std::size_t>(frame.data_bits()), v)};
}

phy::LlrGrid truth_llrs(std::span<const std::uint8_t> bits) {
    phy::LlrGrid g;
    for (auto b : bits) g.llr.push_back(b ? -5.0 : 5.0);
    return g;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("selection label rule") {
    CHECK(selection_label(3, 7) == 1);
    CHECK(selection_label(7, 3) == 0);
    CHECK(selection_label(5, 5) == 0);
    CHECK(selection_label(0, 0) == 0);
}

TEST_CASE("Arch I runs exactly one receiver") {
    FrameConfig frame;
    RngStream rng(1, 0);
    const auto blk = test::uncoded_block(channel::registry_profile(0), frame, 10.0, rng);
    ProbeReceiver trad(constant_llrs(frame, 1.0)), neural(constant_llrs(frame, -1.0));

    SUBCASE("u = 0.7 routes to neural") {
        ConstDisc disc(0.7);
        const auto out = hybrid_receive(blk.rx, Arch::I, {&trad, &neural, nullptr, &disc}, frame, 0.1);
        CHECK(out.verdict.route == Route::Neural);
        CHECK(out.verdict.u == 0.7);
        CHECK(out.llrs.llr == constant_llrs(frame, -1.0).llr);
        CHECK(neural.calls == 1);
        CHECK(trad.calls == 0);
    }
    SUBCASE("u = 0.2 routes to traditional") {
        ConstDisc disc(0.2);
        const auto out = hybrid_receive(blk.rx, Arch::I, {&trad, &neural, nullptr, &disc}, frame, 0.1);
        CHECK(out.verdict.route == Route::Traditional);
        CHECK(out.llrs.llr == constant_llrs(frame, 1.0).llr);
        CHECK(neural.calls == 0);
        CHECK(trad.calls == 1);
    }
    SUBCASE("u = 0.5 routes to neural") {
        ConstDisc disc(0.5);
        CHECK(hybrid_receive(blk.rx, Arch::I, {&trad, &neural, nullptr, &disc}, frame, 0.1).verdict.route ==
              Route::Neural);
    }
}

TEST_CASE("forced routing reproduces the single receivers") {
    FrameConfig frame;
    RngStream rng(2, 0);
    const auto blk = test::uncoded_block(channel::registry_profile(1), frame, 8.0, rng);
    TraditionalReceiver trad;
    RngStream init(3, 0);
    neural::NeuralRxConfig ncfg;
    ncfg.num_res_blocks = 1;
    ncfg.filters = 8;
    auto params = neural::init_neural_rx(ncfg, frame, init);
    // nonzero output layer so the neural LLRs are not all zero
    for (auto& v : params.at("out.kernel").data()) v = static_cast<nn::Real>(init.normal() * 0.1);
    NeuralReceiver neural(params, ncfg);
    const double nv = channel::noise_variance(8.0);
    ConstDisc one(1.0), zero(0.0);
    CHECK(hybrid_receive(blk.rx, Arch::I, {&trad, &neural, nullptr, &one}, frame, nv).llrs.llr ==
          neural::neural_receive(params, ncfg, frame, blk.rx, nv).llr);
    CHECK(hybrid_receive(blk.rx, Arch::I, {&trad, &neural, nullptr, &zero}, frame, nv).llrs.llr ==
          rx::traditional_receive(blk.rx, frame, nv).llr);
}

TEST_CASE("Arch II and III call order") {
    FrameConfig frame;
    RngStream rng(4, 0);
    const auto blk = test::uncoded_block(channel::registry_profile(0), frame, 10.0, rng);
    DiscConfig llr_cfg;
    llr_cfg.llr_channels = frame.bits_per_symbol();
    ProbeReceiver trad(constant_llrs(frame, 1.0)), neural(constant_llrs(frame, -1.0));
    ProbeEnhancer enh(constant_llrs(frame, 2.0));

    SUBCASE("II, high u uses the enhancer") {
        ConstDisc disc(0.9, llr_cfg);
        const auto out = hybrid_receive(blk.rx, Arch::II, {&trad, nullptr, &enh, &disc}, frame, 0.1);
        CHECK(out.llrs.llr == constant_llrs(frame, 2.0).llr);
        CHECK(trad.calls == 1);
        CHECK(enh.calls == 1);
    }
    SUBCASE("II, low u passes the traditional LLRs") {
        ConstDisc disc(0.1, llr_cfg);
        const auto out = hybrid_receive(blk.rx, Arch::II, {&trad, nullptr, &enh, &disc}, frame, 0.1);
        CHECK(out.llrs.llr == constant_llrs(frame, 1.0).llr);
        CHECK(trad.calls == 1);
        CHECK(enh.calls == 0);
    }
    SUBCASE("III, high u keeps neural") {
        ConstDisc disc(0.9, llr_cfg);
        const auto out = hybrid_receive(blk.rx, Arch::III, {&trad, &neural, nullptr, &disc}, frame, 0.1);
        CHECK(out.llrs.llr == constant_llrs(frame, -1.0).llr);
        CHECK(neural.calls == 1);
        CHECK(trad.calls == 0);
    }
    SUBCASE("III, low u falls back to traditional") {
        ConstDisc disc(0.1, llr_cfg);
        const auto out = hybrid_receive(blk.rx, Arch::III, {&trad, &neural, nullptr, &disc}, frame, 0.1);
        CHECK(out.llrs.llr == constant_llrs(frame, 1.0).llr);
        CHECK(neural.calls == 1);
        CHECK(trad.calls == 1);
    }
}

TEST_CASE("missing parts raise load errors") {
    FrameConfig frame;
    RngStream rng(5, 0);
    const auto blk = test::uncoded_block(channel::registry_profile(0), frame, 10.0, rng);
    ProbeReceiver trad(constant_llrs(frame, 1.0)), neural(constant_llrs(frame, -1.0));
    ConstDisc disc(0.9);
    CHECK_THROWS_AS(hybrid_receive(blk.rx, Arch::I, {&trad, &neural, nullptr, nullptr}, frame, 0.1), LoadError);
    CHECK_THROWS_AS(hybrid_receive(blk.rx, Arch::I, {&trad, nullptr, nullptr, &disc}, frame, 0.1), LoadError);
    CHECK_THROWS_AS(hybrid_receive(blk.rx, Arch::II, {&trad, &neural, nullptr, &disc}, frame, 0.1), LoadError);
    CHECK_THROWS_AS(hybrid_receive(blk.rx, Arch::III, {nullptr, &neural, nullptr, &disc}, frame, 0.1), LoadError);
    CHECK(parse_arch("II") == Arch::II);
    CHECK_THROWS_AS(parse_arch("IV"), ConfigError);
}

TEST_CASE("genie keeps the better receiver") {
    FrameConfig frame;
    TraditionalReceiver trad;
    RngStream rng(6, 0);
    for (int i = 0; i < 20; ++i) {
        const auto blk = test::uncoded_block(channel::registry_profile(2), frame, 3.0, rng);
        auto noisy = truth_llrs(blk.tx.bits);
        for (std::size_t j = 0; j < noisy.llr.size(); j += 7 + static_cast<std::size_t>(i)) noisy.llr[j] = -noisy.llr[j];
        ProbeReceiver neural(noisy);
        const double nv = channel::noise_variance(3.0);
        const auto g = genie_select(blk.rx, blk.tx.bits, {&trad, &neural, nullptr, nullptr}, frame, nv);
        const auto e = phy::count_bit_errors(g.llrs, blk.tx.bits);
        CHECK(e == std::min(g.neural_errors, g.trad_errors));
        CHECK(g.neural_errors == phy::count_bit_errors(noisy, blk.tx.bits));
        CHECK(g.trad_errors == phy::count_bit_errors(rx::traditional_receive(blk.rx, frame, nv), blk.tx.bits));
        CHECK((g.route == Route::Neural) == (g.neural_errors < g.trad_errors));
    }
    // ties go to traditional
    RngStream r2(7, 0);
    const auto blk = test::uncoded_block(channel::registry_profile(0), frame, 10.0, r2);
    ProbeReceiver same(rx::traditional_receive(blk.rx, frame, 0.1));
    CHECK(genie_select(blk.rx, blk.tx.bits, {&trad, &same, nullptr, nullptr}, frame, 0.1).route == Route::Traditional);
}

TEST_CASE("discriminator features") {
    FrameConfig frame;
    RngStream rng(8, 0);
    auto blk = test::uncoded_block(channel::registry_profile(3), frame, 15.0, rng);
    const DiscConfig cfg;
    const auto f = disc_featurize(blk.rx, frame, cfg);
    CHECK(f.shape() == nn::Shape{1, 2, frame.num_subcarriers, 2 * frame.num_rx_antennas});
    CHECK(cfg.input_channels(frame) == 2 * frame.num_rx_antennas);

    double power = 0;
    for (auto v : f.data()) power += static_cast<double>(v) * v;
    CHECK(power / (static_cast<double>(f.size()) / 2.0) == doctest::Approx(1.0).epsilon(1e-5));

    // data REs do not enter the features
    auto perturbed = blk.rx;
    for (int a = 0; a < frame.num_rx_antennas; ++a)
        for (int t : frame.data_symbols())
            for (int k = 0; k < frame.num_subcarriers; ++k) perturbed.at(a, t, k) *= cplx(3.0, -1.0);
    const auto fp = disc_featurize(perturbed, frame, cfg);
    CHECK(std::ranges::equal(fp.data(), f.data()));

    DiscConfig llr_cfg;
    llr_cfg.llr_channels = frame.bits_per_symbol();
    CHECK_THROWS_AS(disc_featurize(blk.rx, frame, llr_cfg), ValidationError);
    const auto llrs = rx::traditional_receive(blk.rx, frame, 0.03);
    const auto g = disc_featurize(blk.rx, frame, llr_cfg, &llrs);
    CHECK(g.shape() == nn::Shape{1, 2, frame.num_subcarriers, 2 * frame.num_rx_antennas + frame.bits_per_symbol()});
    const int c = g.shape()[3];
    for (int i = 0; i < g.size(); ++i)
        if (i % c >= 2 * frame.num_rx_antennas) CHECK(std::abs(g[i]) <= 2.0f);
}

TEST_CASE("discriminator network") {
    FrameConfig frame;
    DiscConfig cfg;
    RngStream rng(9, 0);
    auto params = init_discriminator(cfg, frame, rng);
    const int c = cfg.input_channels(frame), pilots = static_cast<int>(frame.pilot_symbols.size());
    const std::size_t expected = (9 * c * 32 + 32) + (9 * 32 * 64 + 64) + (9 * 64 * 64 + 64) + 2 * (32 + 64 + 64) +
                                 (static_cast<std::size_t>(pilots) * frame.num_subcarriers * 64 * 30 + 30) + (30 + 1);
    CHECK(params.trainable_count() == expected);
    CHECK(params.trainable_count() > 250000);
    CHECK(params.trainable_count() < 350000);

    RngStream r2(10, 0);
    const auto blk = test::uncoded_block(channel::registry_profile(0), frame, 10.0, r2);
    CHECK(disc_u(params, cfg, disc_featurize(blk.rx, frame, cfg)) == doctest::Approx(0.5).epsilon(1e-9));

    DiscConfig other = cfg;
    other.llr_channels = 2;
    CHECK(cfg.hash(frame) == DiscConfig{}.hash(frame));
    CHECK(cfg.hash(frame) != other.hash(frame));

    const auto path = temp_file("hrx_disc_test.hrxm");
    nn::save_checkpoint(path.string(), make_disc_checkpoint(params, cfg, frame));
    const auto loaded = load_disc_checkpoint(path.string(), cfg, frame);
    CHECK(loaded.trainable_count() == params.trainable_count());
    CHECK_THROWS_AS(load_disc_checkpoint(path.string(), other, frame), LoadError);
    std::filesystem::remove(path);
}

TEST_CASE("synthetic blobs are learned") {
    FrameConfig frame;
    DiscConfig cfg;
    DiscDataset ds;
    ds.feature_shape = {2, frame.num_subcarriers, cfg.input_channels(frame)};
    const std::size_t per = nn::shape_size(ds.feature_shape);
    RngStream rng(11, 0);
    for (int i = 0; i < 300; ++i) {
        DiscSample s;
        s.label = static_cast<std::uint8_t>(i % 2);
        const double mean = s.label ? 0.3 : -0.3;
        for (std::size_t j = 0; j < per; ++j) s.features.push_back(static_cast<nn::Real>(mean + rng.normal()));
        ds.samples.push_back(std::move(s));
    }
    DiscTrainConfig tc;
    tc.epochs = 20;
    const auto res = train_discriminator(ds, cfg, frame, tc);
    REQUIRE(res.log.size() == 20);
    CHECK(res.holdout.size() == 60);
    CHECK(res.log.back().holdout_accuracy >= 0.95);
    const auto u = disc_outputs(res.params, cfg, ds, res.holdout);
    CHECK(u.size() == 60);

    DiscDataset one = ds;
    for (auto& s : one.samples) s.label = 1;
    CHECK_THROWS_AS(train_discriminator(one, cfg, frame, tc), ValidationError);
}

TEST_CASE("labeling and dataset construction") {
    FrameConfig frame;
    const DiscConfig cfg;
    TraditionalReceiver trad;

    SUBCASE("label_sample counts errors of both sides") {
        RngStream rng(12, 0);
        const auto blk = test::uncoded_block(channel::registry_profile(0), frame, 2.0, rng);
        ProbeReceiver perfect(truth_llrs(blk.tx.bits));
        const auto s = label_sample(blk.rx, blk.tx.bits, Arch::I, {&trad, &perfect, nullptr, nullptr}, cfg, frame,
                                    channel::noise_variance(2.0));
        CHECK(s.meta.neural_errors == 0);
        CHECK(s.meta.trad_errors > 0);
        CHECK(s.label == 1);
        CHECK(s.features.size() == static_cast<std::size_t>(disc_featurize(blk.rx, frame, cfg).size()));
    }

    DiscRecipe recipe;
    recipe.count = 1200;
    ProbeReceiver neural(constant_llrs(frame, 1.0));
    const HybridParts parts{&trad, &neural, nullptr, nullptr};

    SUBCASE("anomaly fraction") {
        recipe.anomaly_fraction = 0.0;
        const auto none = build_disc_dataset(recipe, parts, cfg, frame);
        for (const auto& s : none.samples) CHECK_FALSE(s.meta.channel == recipe.anomaly);

        recipe.anomaly_fraction = 0.15;
        const auto ds = build_disc_dataset(recipe, parts, cfg, frame);
        double n_anom = 0;
        for (const auto& s : ds.samples) {
            n_anom += s.meta.channel == recipe.anomaly;
            CHECK(s.meta.snr_db >= recipe.snr_lo_db);
            CHECK(s.meta.snr_db <= recipe.snr_hi_db);
        }
        const double n = recipe.count, p = 0.15;
        CHECK(std::abs(n_anom - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)));
    }

    SUBCASE("deterministic and independent of threads") {
        recipe.count = 60;
        TraditionalReceiver t1, t2;
        ProbeReceiver n1(constant_llrs(frame, 1.0));
        const auto a = build_disc_dataset(recipe, {&t1, &n1, nullptr, nullptr}, cfg, frame, 1);
        const auto b = build_disc_dataset(recipe, {&t2, &n1, nullptr, nullptr}, cfg, frame, 3);
        CHECK(a.hash() == b.hash());
        recipe.seed += 1;
        CHECK(build_disc_dataset(recipe, parts, cfg, frame).hash() != a.hash());
    }

    SUBCASE("HRXD round trip") {
        recipe.count = 25;
        const auto ds = build_disc_dataset(recipe, parts, cfg, frame);
        const auto path = temp_file("hrx_test.hrxd");
        save_disc_dataset(path, ds);
        const auto back = load_disc_dataset(path);
        CHECK(back.feature_shape == ds.feature_shape);
        CHECK(back.hash() == ds.hash());

        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
        CHECK_THROWS_AS(load_disc_dataset(path), LoadError);
        {
            std::ofstream os(path, std::ios::binary);
            os << "HRXM1234";
        }
        CHECK_THROWS_AS(load_disc_dataset(path), LoadError);
        std::filesystem::remove(path);
    }
}
