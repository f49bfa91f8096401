// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hrx/channel/fading.hpp"
#include "hrx/channel/profile.hpp"
