// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>

#include "hrx/decider/dataset.hpp"
#include "hrx/harness/config.hpp"
#include "hrx/harness/sweep.hpp"
#include "hrx/neural/train.hpp"

namespace hrx::harness {

/// Every key the harness understands; anything else in a config file is an
/// error.
const std::set<std::string>& known_keys();

phy::FrameConfig frame_from(const Config& c);
/// `paper_scale` switches the defaults to the full-size network; explicit keys
/// still win.
neural::NeuralRxConfig neural_from(const Config& c, bool paper_scale = false);
/// Enhancer: the neural receiver plus one LLR input channel per bit.
neural::NeuralRxConfig enhancer_from(const Config& c, const phy::FrameConfig& frame, bool paper_scale = false);
neural::TrainRecipe train_recipe_from(const Config& c);
decider::DiscConfig disc_from(const Config& c, const phy::FrameConfig& frame, decider::Arch arch);
decider::DiscRecipe disc_recipe_from(const Config& c);
decider::DiscTrainConfig disc_train_from(const Config& c);
SweepConfig sweep_from(const Config& c);

std::vector<channel::ChannelId> parse_channel_list(const std::vector<std::string>& items);

}  // namespace hrx::harness
