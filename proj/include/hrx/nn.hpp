// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hrx/nn/checkpoint.hpp"
#include "hrx/nn/ops.hpp"
#include "hrx/nn/params.hpp"
#include "hrx/nn/tensor.hpp"
