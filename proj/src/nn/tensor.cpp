// SPDX-License-Identifier: Apache-2.0
#include "hrx/nn/tensor.hpp"

#include <cmath>
#include <unordered_set>
#include <utility>

#include "hrx/errors.hpp"

namespace hrx::nn {

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw ShapeError("negative dimension in shape " + shape_string(shape));
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

std::string shape_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

std::vector<Real>& Node::grad_buffer() {
    if (grad.empty()) grad.assign(data.size(), Real(0));
    return grad;
}

namespace {
thread_local bool tls_grad_enabled = true;
}

bool grad_enabled() { return tls_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(tls_grad_enabled) { tls_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { tls_grad_enabled = previous_; }

Tensor::Tensor() : node_(std::make_shared<Node>()) {}

Tensor::Tensor(Shape shape, Real fill, bool requires_grad) : node_(std::make_shared<Node>()) {
    node_->data.assign(shape_size(shape), fill);
    node_->shape = std::move(shape);
    node_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<Real> data, bool requires_grad)
    : node_(std::make_shared<Node>()) {
    if (shape_size(shape) != data.size()) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_string(shape));
    }
    node_->shape = std::move(shape);
    node_->data = std::move(data);
    node_->requires_grad = requires_grad;
}

Tensor Tensor::from_node(std::shared_ptr<Node> node) {
    Tensor t;
    t.node_ = std::move(node);
    return t;
}

Real Tensor::item() const {
    if (size() != 1) throw ShapeError("item() on tensor of shape " + shape_string(shape()));
    return node_->data[0];
}

Tensor Tensor::detach() const { return Tensor(shape(), node_->data, false); }

bool Tensor::all_finite() const {
    for (Real v : node_->data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::backward() {
    if (size() != 1) throw ShapeError("backward() needs a scalar, got " + shape_string(shape()));

    // iterative post-order DFS gives a topological order
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
    visited.insert(node_.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    node_->grad_buffer().assign(1, Real(1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backward_fn && !node->grad.empty()) node->backward_fn(*node);
    }
}

}  // namespace hrx::nn
