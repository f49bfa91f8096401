// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "hrx/decider/dataset.hpp"

namespace hrx::harness {

struct SelectionReport {
    // positive class: label 1 (neural side better)
    std::size_t true_pos = 0, false_pos = 0, true_neg = 0, false_neg = 0;
    struct ChannelRow {
        std::string channel;
        std::size_t count = 0;
        std::size_t correct = 0;
        double accuracy() const { return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0; }
    };
    std::vector<ChannelRow> per_channel;  // sorted by channel id string

    std::size_t total() const { return true_pos + false_pos + true_neg + false_neg; }
    double accuracy() const;
};

/// Thresholds u at 0.5 against the labels. Throws ValidationError on an empty
/// dataset or a length mismatch.
SelectionReport report_selection(std::span<const double> u, const decider::DiscDataset& ds);
SelectionReport report_selection(const nn::LayerParams& params, const decider::DiscConfig& config,
                                 const decider::DiscDataset& ds);

std::string format_report(const SelectionReport& report);

}  // namespace hrx::harness
