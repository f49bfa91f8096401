// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hrx/errors.hpp"
#include "hrx/harness/config.hpp"
#include "hrx/harness/parts.hpp"
#include "hrx/harness/report.hpp"
#include "hrx/harness/settings.hpp"
#include "hrx/harness/sweep.hpp"
#include "hrx/nn/checkpoint.hpp"

using namespace hrx;
using namespace hrx::harness;

namespace {

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Small neural receiver with a random output layer, so its LLRs are poor but
/// not all zero.
struct RandomNeural {
    neural::NeuralRxConfig cfg;
    nn::LayerParams params;
    explicit RandomNeural(const phy::FrameConfig& frame) {
        cfg.num_res_blocks = 1;
        cfg.filters = 4;
        RngStream rng(5, 5);
        params = neural::init_neural_rx(cfg, frame, rng);
        for (auto& v : params.at("out.kernel").data()) v = static_cast<nn::Real>(0.3 * rng.normal());
    }
};

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse("# comment\n\nsweep.snr_db = 0, 5,10 # trailing\nsweep.blocks=3\nflag = yes\n");
    CHECK(c.get_doubles("sweep.snr_db", {}) == std::vector<double>{0, 5, 10});
    CHECK(c.get_int("sweep.blocks", 0) == 3);
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_int("absent", 7) == 7);
    CHECK(c.get_string("absent", "x") == "x");

    CHECK_THROWS_WITH_AS(Config::parse("a = 1\na = 2\n", "f.cfg"), doctest::Contains("f.cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(Config::parse("just text\n", "g.cfg"), doctest::Contains("g.cfg:1"), ConfigError);
    CHECK_THROWS_AS(Config::parse("bad key = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("n = 1.5\n").get_int("n", 0), ConfigError);
    CHECK_THROWS_AS(Config::parse("b = maybe\n").get_bool("b", false), ConfigError);
    CHECK_THROWS_WITH_AS(Config::load("no/such/file.cfg"), doctest::Contains("no/such/file.cfg"), ConfigError);
    CHECK_THROWS_WITH_AS(Config::parse("sweep.blokcs = 1\n").require_known(known_keys()), doctest::Contains("sweep.blokcs"),
                         ConfigError);
}

TEST_CASE("settings from config") {
    const auto c = Config::parse(
        "frame.antennas = 1\nframe.modulation = qam16\nframe.pilots = 3, 10\n"
        "train.channels = 0, 7, a4x5\ntrain.epochs = 2\nsweep.channel = awgn\nsweep.receivers = traditional, perfect\n"
        "sweep.arch = III\nlabel.anomaly_fraction = 0.3\ndisc.class_weight = true\n");
    c.require_known(known_keys());
    const auto f = frame_from(c);
    CHECK(f.num_rx_antennas == 1);
    CHECK(f.modulation == phy::Modulation::Qam16);
    CHECK(f.pilot_symbols == std::vector<int>{3, 10});
    const auto r = train_recipe_from(c);
    REQUIRE(r.channels.size() == 3);
    CHECK(r.channels[2].str() == "a4x5");
    CHECK(r.epochs == 2);
    const auto s = sweep_from(c);
    CHECK(s.channel == "awgn");
    CHECK(s.arch == decider::Arch::III);
    CHECK(s.receivers.size() == 2);
    CHECK(disc_recipe_from(c).anomaly_fraction == 0.3);
    CHECK(disc_train_from(c).class_weight);
    CHECK(disc_from(c, f, decider::Arch::II).llr_channels == 4);
    CHECK(neural_from(Config{}, true).filters == 128);
    CHECK(enhancer_from(Config{}, f).llr_channels == 4);

    CHECK_THROWS_AS(sweep_from(Config::parse("sweep.receivers = oracle\n")), ConfigError);
    CHECK_THROWS_AS(sweep_from(Config::parse("sweep.channel = 18\n")), ConfigError);
    CHECK_THROWS_AS(sweep_from(Config::parse("sweep.snr_db = inf\n")), ConfigError);
}

TEST_CASE("sweep: AWGN perfect-CSI row matches the Q-function") {
    SweepConfig s;
    s.frame.num_rx_antennas = 1;
    s.receivers = {"perfect", "traditional"};
    s.channel = "awgn";
    s.snr_db = {4.0 + 10 * std::log10(2.0)};
    s.blocks = 70;  // 107520 bits
    const LoadedParts parts;
    const auto res = run_sweep(s, parts.view());
    const auto& row = res.row("perfect", s.snr_db[0]);
    CHECK(row.bits >= 100000u);
    const double p = qfunc(std::sqrt(2 * std::pow(10.0, 0.4)));
    CHECK(p == doctest::Approx(1.25e-2).epsilon(0.01));
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(row.bits));
    CHECK(std::abs(row.uncoded_ber() - p) < 3 * se);
    CHECK(res.row("traditional", s.snr_db[0]).route_fraction_neural() == 0.0);
    CHECK(row.coded_ber() <= row.uncoded_ber());
}

TEST_CASE("sweep: genie bound, CSV schema and determinism") {
    SweepConfig s;
    s.snr_db = {0.0, 10.0};
    s.blocks = 12;
    RandomNeural net(s.frame);
    LoadedParts parts;
    parts.neural = std::make_unique<decider::NeuralReceiver>(net.params, net.cfg);
    s.receivers = {"traditional", "perfect", "neural", "genie"};

    const auto a = run_sweep(s, parts.view());
    for (double snr : s.snr_db) {
        const auto& g = a.row("genie", snr);
        CHECK(g.bit_errors <= a.row("neural", snr).bit_errors);
        CHECK(g.bit_errors <= a.row("traditional", snr).bit_errors);
        CHECK(a.row("neural", snr).route_fraction_neural() == 1.0);
        for (const auto& r : a.rows) {
            CHECK(r.bit_errors <= r.bits);
            CHECK(r.block_errors <= r.blocks);
            CHECK(r.channel_index == "mixed");
        }
    }
    const auto csv = to_csv(a);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "receiver,channel_index,snr_db,bits,bit_errors,uncoded_ber,blocks,block_errors,bler,coded_ber,"
          "route_fraction_neural,seed");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 2);

    CHECK(to_csv(run_sweep(s, parts.view())) == csv);
    s.threads = 3;
    CHECK(to_csv(run_sweep(s, parts.view())) == csv);
    s.seed += 1;
    CHECK(to_csv(run_sweep(s, parts.view())) != csv);

    const auto json = to_json(a, s);
    CHECK(json.find("\"rows\"") != std::string::npos);
    CHECK(json.find("\"build\"") != std::string::npos);
}

TEST_CASE("sweep: missing parts fail before simulating") {
    SweepConfig s;
    s.blocks = 1;
    const LoadedParts none;
    s.receivers = {"neural"};
    CHECK_THROWS_AS(run_sweep(s, none.view()), LoadError);
    s.receivers = {"hybrid"};
    CHECK_THROWS_AS(run_sweep(s, none.view()), LoadError);

    RandomNeural net(s.frame);
    LoadedParts p;
    p.neural = std::make_unique<decider::NeuralReceiver>(net.params, net.cfg);
    decider::DiscConfig llr_disc;
    llr_disc.llr_channels = 2;
    RngStream rng(1, 1);
    p.disc = std::make_unique<decider::NetDiscriminator>(decider::init_discriminator(llr_disc, s.frame, rng), llr_disc);
    CHECK_THROWS_AS(run_sweep(s, p.view()), LoadError);  // Arch I with an Arch II/III discriminator
}

TEST_CASE("load_parts reads the configured checkpoints") {
    const phy::FrameConfig frame;
    RandomNeural net(frame);
    const auto path = std::filesystem::temp_directory_path() / "hrx_parts_test.hrxm";
    nn::save_checkpoint(path, neural::make_neural_checkpoint(net.params, net.cfg, frame));
    const auto good = Config::parse("neural.blocks = 1\nneural.filters = 4\nneural.checkpoint = " + path.string() + "\n");
    const auto parts = load_parts(good, frame, decider::Arch::I, false);
    CHECK(parts.neural != nullptr);
    CHECK(parts.disc == nullptr);
    const auto wrong = Config::parse("neural.checkpoint = " + path.string() + "\n");
    CHECK_THROWS_AS(load_parts(wrong, frame, decider::Arch::I, false), LoadError);
    CHECK_THROWS_AS(load_parts(Config::parse("disc.checkpoint = /nonexistent.hrxm\n"), frame, decider::Arch::I, false),
                    LoadError);
    std::filesystem::remove(path);
}

TEST_CASE("selection report") {
    decider::DiscDataset ds;
    ds.feature_shape = {1, 1, 1};
    const int labels[] = {1, 0, 1, 1, 0, 0, 1};
    const int chans[] = {0, 0, 1, 7, 7, 7, 1};
    for (int i = 0; i < 7; ++i) {
        decider::DiscSample s;
        s.features = {0};
        s.label = static_cast<std::uint8_t>(labels[i]);
        s.meta.channel = {chans[i]};
        ds.samples.push_back(s);
    }
    std::vector<double> forced;
    for (const auto& s : ds.samples) forced.push_back(1.0 / (1.0 + std::exp(s.label ? -10.0 : 10.0)));
    const auto perfect = report_selection(forced, ds);
    CHECK(perfect.accuracy() == 1.0);
    CHECK(perfect.true_pos == 4);
    CHECK(perfect.true_neg == 3);

    const std::vector<double> u{0.9, 0.9, 0.1, 0.6, 0.2, 0.4, 0.5};
    const auto r = report_selection(u, ds);
    CHECK(r.true_pos == 3);
    CHECK(r.false_pos == 1);
    CHECK(r.false_neg == 1);
    CHECK(r.true_neg == 2);
    double weighted = 0;
    std::size_t n = 0;
    for (const auto& row : r.per_channel) {
        weighted += row.accuracy() * static_cast<double>(row.count);
        n += row.count;
    }
    CHECK(n == 7);
    CHECK(weighted / static_cast<double>(n) == doctest::Approx(r.accuracy()));
    CHECK(format_report(r).find("accuracy 0.7143") != std::string::npos);

    CHECK_THROWS_AS(report_selection(std::vector<double>{}, decider::DiscDataset{}), ValidationError);
    CHECK_THROWS_AS(report_selection(std::vector<double>{0.5}, ds), ValidationError);
}
