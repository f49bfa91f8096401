// SPDX-License-Identifier: Apache-2.0
#include "hrx/nn/params.hpp"

#include <cmath>

#include "hrx/errors.hpp"

namespace hrx::nn {

Tensor& LayerParams::add(const std::string& name, Tensor t) {
    auto [it, inserted] = tensors_.insert_or_assign(name, std::move(t));
    (void)inserted;
    return it->second;
}

Tensor& LayerParams::at(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw LoadError("missing parameter '" + name + "'");
    return it->second;
}

const Tensor& LayerParams::at(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw LoadError("missing parameter '" + name + "'");
    return it->second;
}

std::size_t LayerParams::trainable_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_) {
        if (t.requires_grad()) n += t.size();
    }
    return n;
}

std::size_t LayerParams::total_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_) n += t.size();
    return n;
}

void LayerParams::zero_grad() {
    for (auto& [name, t] : tensors_) t.zero_grad();
}

bool LayerParams::all_finite() const {
    for (const auto& [name, t] : tensors_) {
        if (!t.all_finite()) return false;
    }
    return true;
}

LayerParams LayerParams::clone() const {
    LayerParams out;
    for (const auto& [name, t] : tensors_) {
        Tensor copy = t.detach();
        copy.set_requires_grad(t.requires_grad());
        out.add(name, copy);
    }
    return out;
}

void LayerParams::add_batch_norm(const std::string& prefix, int channels) {
    add(prefix + ".gamma", Tensor({channels}, Real(1), true));
    add(prefix + ".beta", Tensor({channels}, Real(0), true));
    add(prefix + ".running_mean", Tensor({channels}, Real(0), false));
    add(prefix + ".running_var", Tensor({channels}, Real(1), false));
}

BatchNormParams LayerParams::batch_norm(const std::string& prefix, Real momentum, Real epsilon) {
    return BatchNormParams{at(prefix + ".gamma"), at(prefix + ".beta"), at(prefix + ".running_mean"),
                           at(prefix + ".running_var"), momentum, epsilon};
}

Tensor he_normal(Shape shape, int fan_in, RngStream& rng) {
    Tensor t(std::move(shape), Real(0), true);
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : t.data()) v = static_cast<Real>(sd * rng.normal());
    return t;
}

void adam_step(LayerParams& params, AdamState& state) {
    for (const auto& [name, t] : params) {
        if (t.requires_grad() && !t.has_grad()) {
            throw ValidationError("adam_step: parameter '" + name + "' has no gradient");
        }
    }
    ++state.step;
    const auto& c = state.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (auto& [name, t] : params) {
        if (!t.requires_grad()) continue;
        auto& m = state.first_moment[name];
        auto& v = state.second_moment[name];
        if (m.empty()) {
            m.assign(t.size(), Real(0));
            v.assign(t.size(), Real(0));
        }
        auto w = t.data();
        const auto g = t.grad();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double gi = g[i];
            m[i] = static_cast<Real>(c.beta1 * m[i] + (1.0 - c.beta1) * gi);
            v[i] = static_cast<Real>(c.beta2 * v[i] + (1.0 - c.beta2) * gi * gi);
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] = static_cast<Real>(w[i] - c.lr * mhat / (std::sqrt(vhat) + c.epsilon));
        }
    }
}

double grad_norm(const LayerParams& params) {
    double s = 0.0;
    for (const auto& [name, t] : params) {
        for (Real g : t.grad()) s += static_cast<double>(g) * g;
    }
    return std::sqrt(s);
}

}  // namespace hrx::nn
