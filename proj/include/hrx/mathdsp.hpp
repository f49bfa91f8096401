// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hrx/mathdsp/fft.hpp"
#include "hrx/mathdsp/rng.hpp"
