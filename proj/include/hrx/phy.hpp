// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hrx/phy/frame.hpp"
#include "hrx/phy/ldpc.hpp"
#include "hrx/phy/ofdm.hpp"
#include "hrx/phy/qam.hpp"
