// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hrx/mathdsp/rng.hpp"
#include "hrx/nn/ops.hpp"
#include "hrx/nn/tensor.hpp"

namespace hrx::nn {

/// Named parameter tensors of a model. Iteration order is the name order,
/// which fixes the order of optimizer updates and checkpoint layout.
class LayerParams {
public:
    Tensor& add(const std::string& name, Tensor t);
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    bool contains(const std::string& name) const { return tensors_.count(name) != 0; }

    auto begin() { return tensors_.begin(); }
    auto end() { return tensors_.end(); }
    auto begin() const { return tensors_.begin(); }
    auto end() const { return tensors_.end(); }
    std::size_t size() const { return tensors_.size(); }

    /// Elements across trainable tensors.
    std::size_t trainable_count() const;
    std::size_t total_count() const;
    void zero_grad();
    bool all_finite() const;
    /// Deep copy with fresh storage.
    LayerParams clone() const;

    /// Adds gamma/beta (trainable) and running mean/var under prefix.
    void add_batch_norm(const std::string& prefix, int channels);
    /// Views the four batch-norm tensors stored under prefix.
    BatchNormParams batch_norm(const std::string& prefix, Real momentum, Real epsilon);

private:
    std::map<std::string, Tensor> tensors_;
};

/// He-style fan-in normal initialization: N(0, 2 / fan_in).
Tensor he_normal(Shape shape, int fan_in, RngStream& rng);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::int64_t step = 0;
    std::map<std::string, std::vector<Real>> first_moment;
    std::map<std::string, std::vector<Real>> second_moment;
};

/// Bias-corrected Adam update over every trainable tensor, in name order.
/// Throws ValidationError if a trainable tensor has no gradient.
void adam_step(LayerParams& params, AdamState& state);

/// L2 norm over all gradients currently held by trainable tensors.
double grad_norm(const LayerParams& params);

}  // namespace hrx::nn
