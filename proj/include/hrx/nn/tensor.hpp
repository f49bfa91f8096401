// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hrx::nn {

#ifdef HRX_NN_DOUBLE
using Real = double;
#else
using Real = float;
#endif

using Shape = std::vector<int>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Node {
    Shape shape;
    std::vector<Real> data;
    std::vector<Real> grad;  // empty until a gradient reaches this node
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this node's grad and accumulates into the parents' grads.
    std::function<void(Node&)> backward_fn;

    std::vector<Real>& grad_buffer();
};

/// Dense row-major tensor with a reverse-mode gradient tape.
///
/// Copies share storage. Operations in ops.hpp record a backward closure on the
/// result whenever any input requires a gradient.
class Tensor {
public:
    Tensor();
    explicit Tensor(Shape shape, Real fill = 0, bool requires_grad = false);
    Tensor(Shape shape, std::vector<Real> data, bool requires_grad = false);

    const Shape& shape() const { return node_->shape; }
    int dim(std::size_t axis) const { return node_->shape.at(axis); }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t size() const { return node_->data.size(); }

    std::span<Real> data() { return node_->data; }
    std::span<const Real> data() const { return node_->data; }
    Real& operator[](std::size_t i) { return node_->data[i]; }
    Real operator[](std::size_t i) const { return node_->data[i]; }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool on) { node_->requires_grad = on; }
    bool has_grad() const { return !node_->grad.empty(); }
    std::span<const Real> grad() const { return node_->grad; }
    std::span<Real> grad() { return node_->grad; }
    void zero_grad() { node_->grad.clear(); }

    /// Value of a single-element tensor.
    Real item() const;
    /// Runs the tape from this (single-element) tensor, seeding d(this)=1.
    void backward();
    /// Same storage-independent values, no tape.
    Tensor detach() const;
    bool all_finite() const;

    const std::shared_ptr<Node>& node() const { return node_; }
    static Tensor from_node(std::shared_ptr<Node> node);

private:
    std::shared_ptr<Node> node_;
};

/// False while a NoGradGuard is alive on this thread; ops then skip the tape.
bool grad_enabled();

/// Disables tape recording on the current thread for its lifetime (inference).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

}  // namespace hrx::nn
