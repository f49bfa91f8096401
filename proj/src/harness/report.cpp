// SPDX-License-Identifier: Apache-2.0
#include "hrx/harness/report.hpp"

#include <cstdio>
#include <map>

#include "hrx/errors.hpp"

namespace hrx::harness {

double SelectionReport::accuracy() const {
    const auto n = total();
    return n ? static_cast<double>(true_pos + true_neg) / static_cast<double>(n) : 0.0;
}

SelectionReport report_selection(std::span<const double> u, const decider::DiscDataset& ds) {
    if (ds.samples.empty()) throw ValidationError("selection report: empty dataset");
    if (u.size() != ds.samples.size()) throw ValidationError("selection report: one output per sample required");
    SelectionReport rep;
    std::map<std::string, SelectionReport::ChannelRow> rows;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const bool pred = decider::route_for(u[i]) == decider::Route::Neural;
        const bool label = ds.samples[i].label == 1;
        if (pred && label) ++rep.true_pos;
        if (pred && !label) ++rep.false_pos;
        if (!pred && !label) ++rep.true_neg;
        if (!pred && label) ++rep.false_neg;
        auto& row = rows[ds.samples[i].meta.channel.str()];
        row.channel = ds.samples[i].meta.channel.str();
        ++row.count;
        row.correct += pred == label;
    }
    for (auto& [k, row] : rows) rep.per_channel.push_back(row);
    return rep;
}

SelectionReport report_selection(const nn::LayerParams& params, const decider::DiscConfig& config,
                                 const decider::DiscDataset& ds) {
    if (ds.samples.empty()) throw ValidationError("selection report: empty dataset");
    const auto u = decider::disc_outputs(params, config, ds);
    return report_selection(u, ds);
}

std::string format_report(const SelectionReport& r) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "accuracy %.4f over %zu samples\n", r.accuracy(), r.total());
    out += buf;
    out += "confusion (rows: label, cols: route)\n";
    std::snprintf(buf, sizeof buf, "           traditional  neural\ntraditional %11zu %7zu\nneural      %11zu %7zu\n",
                  r.true_neg, r.false_pos, r.false_neg, r.true_pos);
    out += buf;
    out += "channel,count,correct,accuracy\n";
    for (const auto& row : r.per_channel) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.4f\n", row.channel.c_str(), row.count, row.correct, row.accuracy());
        out += buf;
    }
    return out;
}

}  // namespace hrx::harness
