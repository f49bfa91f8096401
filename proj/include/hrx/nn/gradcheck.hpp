// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <type_traits>
#include <vector>

#include "hrx/mathdsp/rng.hpp"
#include "hrx/nn/ops.hpp"

/// Finite-difference gradient oracle.
namespace hrx::nn::gradcheck {

constexpr bool kDouble = std::is_same_v<Real, double>;
constexpr double kTolerance = kDouble ? 1e-6 : 1e-3;

inline Tensor random_tensor(Shape shape, RngStream& rng, bool requires_grad = true,
                            double scale = 1.0, double min_abs = 0.0) {
    Tensor t(std::move(shape), Real(0), requires_grad);
    for (auto& v : t.data()) {
        double x;
        do {
            x = scale * rng.normal();
        } while (std::abs(x) < min_abs);
        v = static_cast<Real>(x);
    }
    return t;
}

/// Reduces an arbitrary tensor to a scalar via a fixed random projection so the
/// gradient reaching the op under test is dense and non-uniform.
struct Projection {
    std::vector<double> weights;

    double value(const Tensor& out) const {
        double s = 0;
        for (std::size_t i = 0; i < out.size(); ++i) s += weights[i] * out[i];
        return s;
    }
    Tensor scalar(const Tensor& out) const {
        Tensor w({static_cast<int>(out.size()), 1});
        for (std::size_t i = 0; i < out.size(); ++i) w[i] = static_cast<Real>(weights[i]);
        return dense(reshape(out, {1, static_cast<int>(out.size())}), w, Tensor({1}));
    }
};

/// Relative error ||analytic - numeric|| / max(||analytic||, ||numeric||) for
/// every input tensor, using central differences on the projected output.
inline std::vector<double> check(const std::function<Tensor()>& forward, std::vector<Tensor> inputs,
                                 RngStream& rng, double step = kDouble ? 1e-5 : 1e-2) {
    Tensor probe = forward();
    Projection proj;
    for (std::size_t i = 0; i < probe.size(); ++i) proj.weights.push_back(rng.normal());

    for (auto& t : inputs) t.zero_grad();
    proj.scalar(forward()).backward();

    std::vector<double> errors;
    for (auto& t : inputs) {
        std::vector<double> analytic(t.size(), 0.0);
        if (t.has_grad()) {
            for (std::size_t i = 0; i < t.size(); ++i) analytic[i] = t.grad()[i];
        }
        double diff = 0, na = 0, nn = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const Real saved = t[i];
            t[i] = static_cast<Real>(saved + step);
            const double up = proj.value(forward());
            t[i] = static_cast<Real>(saved - step);
            const double down = proj.value(forward());
            t[i] = saved;
            const double numeric = (up - down) / (2 * step);
            diff += (analytic[i] - numeric) * (analytic[i] - numeric);
            na += analytic[i] * analytic[i];
            nn += numeric * numeric;
        }
        const double denom = std::max(std::sqrt(std::max(na, nn)), 1e-12);
        errors.push_back(std::sqrt(diff) / denom);
    }
    return errors;
}

}  // namespace hrx::nn::gradcheck
