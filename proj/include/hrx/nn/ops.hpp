// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrx/nn/tensor.hpp"

namespace hrx::nn {

/// "Same"-padded, stride-1 cross-correlation.
/// input [N,H,W,Cin], kernel [kh,kw,Cin,Cout] (kh, kw odd), bias [Cout] -> [N,H,W,Cout].
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias);

/// input [N,F], weight [F,U], bias [U] -> [N,U].
Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias);

enum class BatchNormMode { Train, Eval };

struct BatchNormParams {
    Tensor gamma;         // [C], trainable
    Tensor beta;          // [C], trainable
    Tensor running_mean;  // [C], updated in Train mode
    Tensor running_var;   // [C], updated in Train mode
    Real momentum = Real(0.99);
    Real epsilon = Real(1e-5);
};

/// Per-channel normalization over every axis except the last.
/// Train mode needs a batch of at least two and updates the running statistics
/// as running = momentum * running + (1 - momentum) * batch.
Tensor batch_norm(const Tensor& input, BatchNormParams& params, BatchNormMode mode);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor reshape(const Tensor& x, Shape shape);
/// Flattens everything after the leading (batch) axis.
Tensor flatten(const Tensor& x);
/// 1-D tensor of x's flat elements at the given positions.
Tensor gather(const Tensor& x, std::span<const std::uint32_t> flat_indices);

/// Mean binary cross-entropy on logits, stable log-sum form. Targets must be 0 or 1.
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);
/// Weighted variant: sum(w * l) / sum(w).
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets, std::span<const Real> weights);

}  // namespace hrx::nn
