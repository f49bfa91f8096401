// SPDX-License-Identifier: Apache-2.0
#include "hrx/channel/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hrx/errors.hpp"
#include "hrx/hash.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::channel {

namespace {

// 3GPP TR 38.901 TDL-A/B/C: delay normalised to the RMS spread, power in dB.
const std::vector<TdlEntry> kTdlA = {
    {0.0000, -13.4}, {0.3819, 0.0},   {0.4025, -2.2},  {0.5868, -4.0},  {0.4610, -6.0},  {0.5375, -8.2},
    {0.6708, -9.9},  {0.5750, -10.5}, {0.7618, -7.5},  {1.5375, -15.9}, {1.8978, -6.6},  {2.2242, -16.7},
    {2.1718, -12.4}, {2.4942, -15.2}, {2.5119, -10.8}, {3.0582, -11.3}, {4.0810, -12.7}, {4.4579, -16.2},
    {4.5695, -18.3}, {4.7966, -18.9}, {5.0066, -16.6}, {5.3043, -19.9}, {9.6586, -29.7}};
const std::vector<TdlEntry> kTdlB = {
    {0.0000, 0.0},   {0.1072, -2.2},  {0.2155, -4.0},  {0.2095, -3.2},  {0.2870, -9.8},  {0.2986, -1.2},
    {0.3752, -3.4},  {0.5055, -5.2},  {0.3681, -7.6},  {0.3697, -3.0},  {0.5700, -8.9},  {0.5283, -9.0},
    {1.1021, -4.8},  {1.2756, -5.7},  {1.5474, -7.5},  {1.7842, -1.9},  {2.0169, -7.6},  {2.8294, -12.2},
    {3.0219, -9.8},  {3.6187, -11.4}, {4.1067, -14.9}, {4.2790, -9.2},  {4.7834, -11.3}};
const std::vector<TdlEntry> kTdlC = {
    {0.0000, -4.4},  {0.2099, -1.2},  {0.2219, -3.5},  {0.2329, -5.2},  {0.2176, -2.5},  {0.6366, 0.0},
    {0.6448, -2.2},  {0.6560, -3.9},  {0.6584, -7.4},  {0.7935, -7.1},  {0.8213, -10.7}, {0.9336, -11.1},
    {1.2285, -5.1},  {1.3083, -6.8},  {2.1704, -8.7},  {2.7105, -13.2}, {4.2589, -13.9}, {4.6003, -13.9},
    {5.4902, -15.8}, {5.6077, -17.1}, {6.3065, -16.0}, {6.6374, -15.7}, {7.0427, -21.6}, {8.6523, -22.8}};

void normalize_powers(std::vector<Tap>& pdp) {
    const double total = std::accumulate(pdp.begin(), pdp.end(), 0.0,
                                         [](double s, const Tap& t) { return s + t.power; });
    for (auto& t : pdp) t.power /= total;
}

void scale_to_spread(std::vector<Tap>& pdp, double target) {
    const double current = rms_delay_spread(pdp);
    if (current <= 0.0) return;
    for (auto& t : pdp) t.delay *= target / current;
}

double max_delay(const std::vector<Tap>& pdp) {
    double m = 0.0;
    for (const auto& t : pdp) m = std::max(m, t.delay);
    return m;
}

std::vector<ChannelProfile> build_registry() {
    const double cp = phy::FrameConfig{}.cp_duration();
    const double spreads[] = {30e-9, 300e-9, 100e-9, 1000e-9};
    std::vector<ChannelProfile> reg;
    for (double ds : spreads) {
        for (char m : {'A', 'B', 'C'}) {
            auto p = make_tdl(m, ds, cp);
            p.index = static_cast<int>(reg.size());
            reg.push_back(std::move(p));
        }
    }
    const double rho_s[] = {0.0, 0.9};
    const double rho_t[] = {1.0, 0.95, 0.8};
    for (double rt : rho_t) {
        for (double rs : rho_s) {
            auto p = make_tdl('B', 300e-9, cp);
            p.index = static_cast<int>(reg.size());
            p.spatial_corr = rs;
            p.doppler_coherence = rt;
            reg.push_back(std::move(p));
        }
    }
    return reg;
}

}  // namespace

std::string ChannelProfile::label() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s-%.0fns%s", model.c_str(), rms_delay_spread * 1e9, anomalous ? "-anomaly" : "");
    return buf;
}

double rms_delay_spread(const std::vector<Tap>& pdp) {
    double p = 0, m1 = 0, m2 = 0;
    for (const auto& t : pdp) {
        p += t.power;
        m1 += t.power * t.delay;
        m2 += t.power * t.delay * t.delay;
    }
    if (p <= 0) return 0.0;
    m1 /= p;
    return std::sqrt(std::max(0.0, m2 / p - m1 * m1));
}

const std::vector<TdlEntry>& tdl_table(char model) {
    switch (model) {
        case 'A': return kTdlA;
        case 'B': return kTdlB;
        case 'C': return kTdlC;
        default: throw ConfigError(std::string("unknown TDL model '") + model + "'");
    }
}

ChannelProfile make_tdl(char model, double delay_spread, double max_delay_s) {
    if (delay_spread <= 0) throw ConfigError("delay spread must be positive");
    ChannelProfile p;
    p.model = std::string("TDL-") + model;
    for (const auto& e : tdl_table(model)) p.pdp.push_back({e.norm_delay, std::pow(10.0, e.power_db / 10.0)});
    std::sort(p.pdp.begin(), p.pdp.end(), [](const Tap& a, const Tap& b) { return a.delay < b.delay; });
    normalize_powers(p.pdp);
    scale_to_spread(p.pdp, delay_spread);
    while (max_delay_s > 0 && max_delay(p.pdp) > max_delay_s) {
        if (p.pdp.size() <= 2) throw ConfigError("delay spread too large for the cyclic prefix");
        p.pdp.pop_back();
        normalize_powers(p.pdp);
        scale_to_spread(p.pdp, delay_spread);
    }
    p.rms_delay_spread = delay_spread;
    return p;
}

ChannelProfile flat_profile() {
    ChannelProfile p;
    p.model = "flat";
    p.pdp = {{0.0, 1.0}};
    return p;
}

ChannelProfile awgn_profile() {
    ChannelProfile p = flat_profile();
    p.model = "awgn";
    p.fading = false;
    return p;
}

const std::vector<ChannelProfile>& profile_registry() {
    static const std::vector<ChannelProfile> reg = build_registry();
    return reg;
}

const ChannelProfile& registry_profile(int index) {
    if (index < 0 || index >= kNumProfiles) throw ConfigError("channel index out of range: " + std::to_string(index));
    return profile_registry()[static_cast<std::size_t>(index)];
}

std::string serialize_registry() {
    std::string out = "index,model,rms_delay_spread_ns,max_delay_ns,taps,spatial_corr,doppler_coherence\n";
    char buf[160];
    for (const auto& p : profile_registry()) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.1f,%.1f,%zu,%.2f,%.2f\n", p.index, p.model.c_str(),
                      p.rms_delay_spread * 1e9, max_delay(p.pdp) * 1e9, p.pdp.size(), p.spatial_corr,
                      p.doppler_coherence);
        out += buf;
    }
    return out;
}

std::uint64_t registry_hash() {
    std::uint64_t h = fnv1a64(serialize_registry());
    char buf[64];
    for (const auto& p : profile_registry()) {
        for (const auto& t : p.pdp) {
            std::snprintf(buf, sizeof buf, "%.17g:%.17g;", t.delay, t.power);
            h = fnv1a64(buf, h);
        }
    }
    return h;
}

ChannelProfile anomaly_profile(int base_index, double severity) {
    if (!(severity >= 1.0)) throw ConfigError("anomaly severity must be >= 1");
    ChannelProfile p = registry_profile(base_index);
    if (severity == 1.0) return p;
    for (auto& t : p.pdp) t.delay *= severity;
    p.rms_delay_spread *= severity;
    p.anomalous = true;
    p.index = -1;
    return p;
}

std::string ChannelId::str() const {
    if (index == kAwgn) return "awgn";
    if (index == kFlat) return "flat";
    if (!anomalous()) return std::to_string(index);
    char buf[48];
    std::snprintf(buf, sizeof buf, "a%dx%g", index, severity);
    return buf;
}

ChannelId parse_channel_id(const std::string& text) {
    ChannelId id;
    if (text == "awgn") return {ChannelId::kAwgn, 1.0};
    if (text == "flat") return {ChannelId::kFlat, 1.0};
    try {
        std::size_t used = 0;
        if (!text.empty() && (text[0] == 'a' || text[0] == 'A')) {
            const auto x = text.find('x');
            if (x == std::string::npos) throw ConfigError("");
            id.index = std::stoi(text.substr(1, x - 1), &used);
            if (used != x - 1) throw ConfigError("");
            const std::string sev = text.substr(x + 1);
            id.severity = std::stod(sev, &used);
            if (used != sev.size()) throw ConfigError("");
        } else {
            id.index = std::stoi(text, &used);
            if (used != text.size()) throw ConfigError("");
        }
    } catch (const std::exception&) {
        throw ConfigError("bad channel id '" + text + "' (expected 0..17 or a<index>x<severity>)");
    }
    if (id.index < 0 || id.index >= kNumProfiles) throw ConfigError("channel index out of range in '" + text + "'");
    if (!(id.severity >= 1.0)) throw ConfigError("anomaly severity must be >= 1 in '" + text + "'");
    return id;
}

ChannelProfile profile_for(const ChannelId& id) {
    if (id.index == ChannelId::kAwgn) return awgn_profile();
    if (id.index == ChannelId::kFlat) return flat_profile();
    return id.anomalous() ? anomaly_profile(id.index, id.severity) : registry_profile(id.index);
}

}  // namespace hrx::channel
