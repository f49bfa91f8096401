// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "hrx/channel.hpp"
#include "hrx/errors.hpp"
#include "hrx/harness/config.hpp"
#include "hrx/harness/oracles.hpp"
#include "hrx/harness/parts.hpp"
#include "hrx/harness/report.hpp"
#include "hrx/harness/settings.hpp"
#include "hrx/harness/sweep.hpp"
#include "hrx/hash.hpp"

using namespace hrx;
using namespace hrx::harness;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 1;
    bool paper_scale = false;
};

Config load_config(const Options& o) {
    Config c = o.config_path.empty() ? Config{} : Config::load(o.config_path);
    c.require_known(known_keys());
    return c;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os || !(os << text)) throw LoadError("cannot write " + path);
}

std::string or_default(const std::string& v, const std::string& fallback) { return v.empty() ? fallback : v; }

int cmd_profiles() {
    std::cout << channel::serialize_registry();
    std::cout << "# registry hash " << hex64(channel::registry_hash()) << "\n";
    return 0;
}

int cmd_train_rx(const Options& o) {
    Config c = load_config(o);
    if (o.seed) c.set("train.seed", std::to_string(*o.seed));
    const auto frame = frame_from(c);
    const bool enhancer = c.get_bool("train.enhancer", false);
    const auto cfg = enhancer ? enhancer_from(c, frame, o.paper_scale) : neural_from(c, o.paper_scale);
    const auto recipe = train_recipe_from(c);
    const auto out = or_default(o.out, enhancer ? "enhancer.hrxm" : "neural_rx.hrxm");

    std::printf("generating %d samples (%s)\n", recipe.num_samples, enhancer ? "enhancer" : "neural receiver");
    const auto data = neural::gen_dataset(recipe, frame, cfg, o.threads);
    std::printf("dataset hash %s\n", hex64(data.hash()).c_str());
    const auto result = neural::train_neural_rx(data, cfg, frame, recipe, [](const neural::EpochLog& e) {
        std::printf("epoch %d loss %.5f grad_norm %.4f %.0f ms\n", e.epoch, e.loss, e.grad_norm, e.wall_ms);
        std::fflush(stdout);
    });
    nn::save_checkpoint(out, neural::make_neural_checkpoint(result.params, cfg, frame));
    write_file(out + ".log.csv", neural::format_train_log(result.log));
    std::printf("wrote %s (%zu trainable parameters)\n", out.c_str(), result.params.trainable_count());
    return 0;
}

int cmd_label(const Options& o) {
    Config c = load_config(o);
    if (o.seed) c.set("label.seed", std::to_string(*o.seed));
    const auto frame = frame_from(c);
    const auto recipe = disc_recipe_from(c);
    const auto parts = load_parts(c, frame, recipe.arch, o.paper_scale);
    const auto cfg = disc_from(c, frame, recipe.arch);
    const auto ds = decider::build_disc_dataset(recipe, parts.view(), cfg, frame, o.threads);
    const auto out = or_default(o.out, "disc.hrxd");
    decider::save_disc_dataset(out, ds);

    std::map<std::string, std::pair<int, int>> hist;
    for (const auto& s : ds.samples) {
        auto& h = hist[s.meta.channel.str()];
        ++h.first;
        h.second += s.label;
    }
    std::printf("labels: %zu of %zu samples favour the neural side\n", ds.positives(), ds.samples.size());
    std::printf("channel,samples,label1\n");
    for (const auto& [id, h] : hist) std::printf("%s,%d,%d\n", id.c_str(), h.first, h.second);
    std::printf("wrote %s (hash %s)\n", out.c_str(), hex64(ds.hash()).c_str());
    return 0;
}

int cmd_train_disc(const Options& o) {
    Config c = load_config(o);
    if (o.seed) c.set("disc.seed", std::to_string(*o.seed));
    const auto frame = frame_from(c);
    if (!c.has("disc.dataset")) throw ConfigError("train-disc needs disc.dataset in the config");
    const auto ds = decider::load_disc_dataset(c.get_string("disc.dataset", ""));
    const auto cfg = disc_config_for(ds, frame);
    const auto train = disc_train_from(c);
    const auto result = decider::train_discriminator(ds, cfg, frame, train, [](const decider::DiscEpochLog& e) {
        std::printf("epoch %d loss %.5f train_acc %.4f holdout_acc %.4f %.0f ms\n", e.epoch, e.loss, e.train_accuracy,
                    e.holdout_accuracy, e.wall_ms);
        std::fflush(stdout);
    });
    const auto out = or_default(o.out, "disc.hrxm");
    nn::save_checkpoint(out, decider::make_disc_checkpoint(result.params, cfg, frame));
    std::string log = "epoch,loss,grad_norm,wall_ms,train_accuracy,holdout_accuracy\n";
    for (const auto& e : result.log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.1f,%.4f,%.4f\n", e.epoch, e.loss, e.grad_norm, e.wall_ms,
                      e.train_accuracy, e.holdout_accuracy);
        log += buf;
    }
    write_file(out + ".log.csv", log);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_sweep(const Options& o) {
    Config c = load_config(o);
    if (o.seed) c.set("sweep.seed", std::to_string(*o.seed));
    auto sweep = sweep_from(c);
    sweep.threads = o.threads;
    const auto parts = load_parts(c, sweep.frame, sweep.arch, o.paper_scale);
    const auto result = run_sweep(sweep, parts.view());
    const auto csv = to_csv(result);
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        write_file(o.out, csv);
        write_file(o.out + ".json", to_json(result, sweep));
        std::printf("wrote %s and %s.json\n", o.out.c_str(), o.out.c_str());
    }
    return 0;
}

int cmd_report(const Options& o) {
    const Config c = load_config(o);
    const auto frame = frame_from(c);
    if (!c.has("disc.dataset") || !c.has("disc.checkpoint"))
        throw ConfigError("report needs disc.dataset and disc.checkpoint in the config");
    const auto ds = decider::load_disc_dataset(c.get_string("disc.dataset", ""));
    const auto cfg = disc_config_for(ds, frame);
    const auto params = decider::load_disc_checkpoint(c.get_string("disc.checkpoint", ""), cfg, frame);
    std::cout << format_report(report_selection(params, cfg, ds));
    return 0;
}

int cmd_selftest() {
    bool ok = true;
    for (const auto& o : oracle_suite()) {
        const auto r = o.run();
        std::printf("%s\n", format_oracle(r).c_str());
        std::fflush(stdout);
        ok = ok && r.pass;
    }
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid OFDM receiver simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config_path, "Key-value config file");
    app.add_option("--seed", o.seed, "Override the seed of the subcommand");
    app.add_option("--out", o.out, "Output path");
    app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--paper-scale", o.paper_scale, "Full-size neural receiver (4 blocks, 128 filters)");

    auto* profiles = app.add_subcommand("profiles", "Print the channel registry");
    auto* train_rx = app.add_subcommand("train-rx", "Train the neural receiver (or the enhancer)");
    auto* label = app.add_subcommand("label", "Build a labeled discriminator dataset");
    auto* train_disc = app.add_subcommand("train-disc", "Train the discriminator");
    auto* sweep = app.add_subcommand("sweep", "Run a BER sweep and write CSV");
    auto* report = app.add_subcommand("report", "Selection accuracy of a discriminator on a dataset");
    auto* selftest = app.add_subcommand("selftest", "Run the DSP, nn and LDPC oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        std::cerr << app.help();
        return 1;
    }

    try {
        if (*profiles) return cmd_profiles();
        if (*train_rx) return cmd_train_rx(o);
        if (*label) return cmd_label(o);
        if (*train_disc) return cmd_train_disc(o);
        if (*sweep) return cmd_sweep(o);
        if (*report) return cmd_report(o);
        if (*selftest) return cmd_selftest();
    } catch (const std::invalid_argument& e) {  // ConfigError, ValidationError, ShapeError
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
    return 1;
}
