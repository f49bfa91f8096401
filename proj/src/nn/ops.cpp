// SPDX-License-Identifier: Apache-2.0
#include "hrx/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <string>

#include "hrx/errors.hpp"

namespace hrx::nn {

namespace {

using MatRM = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using ConstMapRM = Eigen::Map<const MatRM>;
using VecMap = Eigen::Map<Eigen::Matrix<Real, Eigen::Dynamic, 1>>;

std::shared_ptr<Node> make_result(Shape shape, std::initializer_list<const Tensor*> inputs) {
    auto node = std::make_shared<Node>();
    node->data.assign(shape_size(shape), Real(0));
    node->shape = std::move(shape);
    for (const Tensor* t : inputs) {
        if (grad_enabled() && t->requires_grad()) {
            node->requires_grad = true;
            break;
        }
    }
    if (node->requires_grad) {
        for (const Tensor* t : inputs) node->parents.push_back(t->node());
    }
    return node;
}

void expect_rank(const Tensor& t, std::size_t rank, const char* op, const char* what) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(op) + ": " + what + " must have rank " + std::to_string(rank) +
                         ", got shape " + shape_string(t.shape()));
    }
}

void expect_axis(int got, int want, const char* op, const std::string& axis) {
    if (got != want) {
        throw ShapeError(std::string(op) + ": " + axis + " is " + std::to_string(got) +
                         ", expected " + std::to_string(want));
    }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
    expect_rank(input, 4, "conv2d", "input");
    expect_rank(kernel, 4, "conv2d", "kernel");
    expect_rank(bias, 1, "conv2d", "bias");
    const int n = input.dim(0), h = input.dim(1), w = input.dim(2), cin = input.dim(3);
    const int kh = kernel.dim(0), kw = kernel.dim(1), cout = kernel.dim(3);
    if (kh % 2 == 0 || kw % 2 == 0) {
        throw ShapeError("conv2d: kernel axes 0/1 must be odd, got " + shape_string(kernel.shape()));
    }
    expect_axis(kernel.dim(2), cin, "conv2d", "kernel axis 2 (input channels)");
    expect_axis(bias.dim(0), cout, "conv2d", "bias axis 0 (output channels)");

    const int ph = kh / 2, pw = kw / 2;
    const Eigen::Index rows = static_cast<Eigen::Index>(n) * h * w;
    const Eigen::Index cols = static_cast<Eigen::Index>(kh) * kw * cin;

    auto col_buf = std::make_shared<std::vector<Real>>(static_cast<std::size_t>(rows * cols), Real(0));
    {
        const Real* src = input.data().data();
        Real* dst = col_buf->data();
        for (int b = 0; b < n; ++b) {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    Real* row = dst + (((static_cast<std::size_t>(b) * h + y) * w + x) * cols);
                    for (int i = 0; i < kh; ++i) {
                        const int yy = y + i - ph;
                        if (yy < 0 || yy >= h) continue;
                        for (int j = 0; j < kw; ++j) {
                            const int xx = x + j - pw;
                            if (xx < 0 || xx >= w) continue;
                            std::memcpy(row + (i * kw + j) * cin,
                                        src + ((static_cast<std::size_t>(b) * h + yy) * w + xx) * cin,
                                        sizeof(Real) * static_cast<std::size_t>(cin));
                        }
                    }
                }
            }
        }
    }

    auto out = make_result({n, h, w, cout}, {&input, &kernel, &bias});
    {
        ConstMapRM col(col_buf->data(), rows, cols);
        ConstMapRM k(kernel.data().data(), cols, cout);
        MapRM o(out->data.data(), rows, cout);
        o.noalias() = col * k;
        o.rowwise() += Eigen::Map<const Eigen::Matrix<Real, 1, Eigen::Dynamic>>(bias.data().data(), cout);
    }

    if (out->requires_grad) {
        out->backward_fn = [col_buf, n, h, w, cin, kh, kw, cout, ph, pw, rows, cols](Node& self) {
            Node& in = *self.parents[0];
            Node& ker = *self.parents[1];
            Node& bi = *self.parents[2];
            ConstMapRM go(self.grad.data(), rows, cout);
            if (ker.requires_grad) {
                MapRM gk(ker.grad_buffer().data(), cols, cout);
                gk.noalias() += ConstMapRM(col_buf->data(), rows, cols).transpose() * go;
            }
            if (bi.requires_grad) {
                Eigen::Map<Eigen::Matrix<Real, 1, Eigen::Dynamic>> gb(bi.grad_buffer().data(), cout);
                gb += go.colwise().sum();
            }
            if (in.requires_grad) {
                MatRM gcol = go * ConstMapRM(ker.data.data(), cols, cout).transpose();
                Real* gi = in.grad_buffer().data();
                for (int b = 0; b < n; ++b) {
                    for (int y = 0; y < h; ++y) {
                        for (int x = 0; x < w; ++x) {
                            const Real* row = gcol.data() + (((static_cast<std::size_t>(b) * h + y) * w + x) * cols);
                            for (int i = 0; i < kh; ++i) {
                                const int yy = y + i - ph;
                                if (yy < 0 || yy >= h) continue;
                                for (int j = 0; j < kw; ++j) {
                                    const int xx = x + j - pw;
                                    if (xx < 0 || xx >= w) continue;
                                    Real* dst = gi + ((static_cast<std::size_t>(b) * h + yy) * w + xx) * cin;
                                    const Real* s = row + (i * kw + j) * cin;
                                    for (int c = 0; c < cin; ++c) dst[c] += s[c];
                                }
                            }
                        }
                    }
                }
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias) {
    expect_rank(input, 2, "dense", "input");
    expect_rank(weight, 2, "dense", "weight");
    expect_rank(bias, 1, "dense", "bias");
    const int n = input.dim(0), f = input.dim(1), u = weight.dim(1);
    expect_axis(weight.dim(0), f, "dense", "weight axis 0 (input features)");
    expect_axis(bias.dim(0), u, "dense", "bias axis 0 (units)");

    auto out = make_result({n, u}, {&input, &weight, &bias});
    MapRM o(out->data.data(), n, u);
    o.noalias() = ConstMapRM(input.data().data(), n, f) * ConstMapRM(weight.data().data(), f, u);
    o.rowwise() += Eigen::Map<const Eigen::Matrix<Real, 1, Eigen::Dynamic>>(bias.data().data(), u);

    if (out->requires_grad) {
        out->backward_fn = [n, f, u](Node& self) {
            Node& in = *self.parents[0];
            Node& wt = *self.parents[1];
            Node& bi = *self.parents[2];
            ConstMapRM go(self.grad.data(), n, u);
            if (wt.requires_grad) {
                MapRM(wt.grad_buffer().data(), f, u).noalias() +=
                    ConstMapRM(in.data.data(), n, f).transpose() * go;
            }
            if (bi.requires_grad) {
                Eigen::Map<Eigen::Matrix<Real, 1, Eigen::Dynamic>>(bi.grad_buffer().data(), u) +=
                    go.colwise().sum();
            }
            if (in.requires_grad) {
                MapRM(in.grad_buffer().data(), n, f).noalias() +=
                    go * ConstMapRM(wt.data.data(), f, u).transpose();
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor batch_norm(const Tensor& input, BatchNormParams& params, BatchNormMode mode) {
    if (input.rank() < 2) throw ShapeError("batch_norm: input needs rank >= 2, got " + shape_string(input.shape()));
    const int c = input.shape().back();
    for (const Tensor* t : {&params.gamma, &params.beta, &params.running_mean, &params.running_var}) {
        expect_rank(*t, 1, "batch_norm", "parameter");
        expect_axis(t->dim(0), c, "batch_norm", "parameter axis 0 (channels)");
    }
    if (mode == BatchNormMode::Train && input.dim(0) < 2) {
        throw ConfigError("batch_norm: train mode needs batch size >= 2, got " + std::to_string(input.dim(0)));
    }
    const std::size_t m = input.size() / static_cast<std::size_t>(c);
    const Real* x = input.data().data();

    auto mean = std::make_shared<std::vector<Real>>(c);
    auto inv_std = std::make_shared<std::vector<Real>>(c);
    if (mode == BatchNormMode::Train) {
        std::vector<double> sum(c, 0.0), sq(c, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (int k = 0; k < c; ++k) sum[k] += x[i * c + k];
        }
        for (int k = 0; k < c; ++k) sum[k] /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (int k = 0; k < c; ++k) {
                const double d = x[i * c + k] - sum[k];
                sq[k] += d * d;
            }
        }
        auto rm = params.running_mean.data();
        auto rv = params.running_var.data();
        for (int k = 0; k < c; ++k) {
            const double var = sq[k] / static_cast<double>(m);
            (*mean)[k] = static_cast<Real>(sum[k]);
            (*inv_std)[k] = static_cast<Real>(1.0 / std::sqrt(var + params.epsilon));
            const double unbiased = m > 1 ? sq[k] / static_cast<double>(m - 1) : var;
            rm[k] = static_cast<Real>(params.momentum * rm[k] + (1.0 - params.momentum) * sum[k]);
            rv[k] = static_cast<Real>(params.momentum * rv[k] + (1.0 - params.momentum) * unbiased);
        }
    } else {
        for (int k = 0; k < c; ++k) {
            (*mean)[k] = params.running_mean[k];
            (*inv_std)[k] = Real(1) / std::sqrt(params.running_var[k] + params.epsilon);
        }
    }

    auto out = make_result(input.shape(), {&input, &params.gamma, &params.beta});
    auto xhat = std::make_shared<std::vector<Real>>(input.size());
    const Real* g = params.gamma.data().data();
    const Real* be = params.beta.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        for (int k = 0; k < c; ++k) {
            const Real v = (x[i * c + k] - (*mean)[k]) * (*inv_std)[k];
            (*xhat)[i * c + k] = v;
            out->data[i * c + k] = g[k] * v + be[k];
        }
    }

    if (out->requires_grad) {
        const bool train = mode == BatchNormMode::Train;
        out->backward_fn = [xhat, inv_std, m, c, train](Node& self) {
            Node& in = *self.parents[0];
            Node& gamma = *self.parents[1];
            Node& beta = *self.parents[2];
            const Real* gy = self.grad.data();
            std::vector<double> sum_dy(c, 0.0), sum_dy_xhat(c, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                for (int k = 0; k < c; ++k) {
                    sum_dy[k] += gy[i * c + k];
                    sum_dy_xhat[k] += gy[i * c + k] * (*xhat)[i * c + k];
                }
            }
            if (gamma.requires_grad) {
                auto& gg = gamma.grad_buffer();
                for (int k = 0; k < c; ++k) gg[k] += static_cast<Real>(sum_dy_xhat[k]);
            }
            if (beta.requires_grad) {
                auto& gb = beta.grad_buffer();
                for (int k = 0; k < c; ++k) gb[k] += static_cast<Real>(sum_dy[k]);
            }
            if (in.requires_grad) {
                auto& gi = in.grad_buffer();
                const Real* gam = gamma.data.data();
                const double inv_m = 1.0 / static_cast<double>(m);
                for (std::size_t i = 0; i < m; ++i) {
                    for (int k = 0; k < c; ++k) {
                        const std::size_t idx = i * c + k;
                        double d = gy[idx];
                        if (train) d -= inv_m * (sum_dy[k] + (*xhat)[idx] * sum_dy_xhat[k]);
                        gi[idx] += static_cast<Real>(gam[k] * (*inv_std)[k] * d);
                    }
                }
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor relu(const Tensor& x) {
    auto out = make_result(x.shape(), {&x});
    const auto in = x.data();
    for (std::size_t i = 0; i < in.size(); ++i) out->data[i] = in[i] > Real(0) ? in[i] : Real(0);
    if (out->requires_grad) {
        out->backward_fn = [](Node& self) {
            Node& p = *self.parents[0];
            auto& g = p.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (p.data[i] > Real(0)) g[i] += self.grad[i];
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor sigmoid(const Tensor& x) {
    auto out = make_result(x.shape(), {&x});
    const auto in = x.data();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Real v = in[i];
        // split on sign so exp never overflows
        out->data[i] = v >= 0 ? Real(1) / (Real(1) + std::exp(-v)) : std::exp(v) / (Real(1) + std::exp(v));
    }
    if (out->requires_grad) {
        out->backward_fn = [](Node& self) {
            auto& g = self.parents[0]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) {
                const Real s = self.data[i];
                g[i] += self.grad[i] * s * (Real(1) - s);
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("add: shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()) + " differ");
    }
    auto out = make_result(a.shape(), {&a, &b});
    for (std::size_t i = 0; i < a.size(); ++i) out->data[i] = a[i] + b[i];
    if (out->requires_grad) {
        out->backward_fn = [](Node& self) {
            for (auto& p : self.parents) {
                if (!p->requires_grad) continue;
                auto& g = p->grad_buffer();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor reshape(const Tensor& x, Shape shape) {
    if (shape_size(shape) != x.size()) {
        throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as " + shape_string(shape));
    }
    auto out = make_result(std::move(shape), {&x});
    std::copy(x.data().begin(), x.data().end(), out->data.begin());
    if (out->requires_grad) {
        out->backward_fn = [](Node& self) {
            auto& g = self.parents[0]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        };
    }
    return Tensor::from_node(out);
}

Tensor flatten(const Tensor& x) {
    if (x.rank() < 1) throw ShapeError("flatten: scalar input");
    const int n = x.dim(0);
    const int rest = n == 0 ? 0 : static_cast<int>(x.size() / static_cast<std::size_t>(n));
    return reshape(x, {n, rest});
}

Tensor gather(const Tensor& x, std::span<const std::uint32_t> flat_indices) {
    for (auto idx : flat_indices) {
        if (idx >= x.size()) throw ShapeError("gather: index " + std::to_string(idx) + " outside axis 0 of flattened input");
    }
    auto out = make_result({static_cast<int>(flat_indices.size())}, {&x});
    for (std::size_t i = 0; i < flat_indices.size(); ++i) out->data[i] = x[flat_indices[i]];
    if (out->requires_grad) {
        std::vector<std::uint32_t> idx(flat_indices.begin(), flat_indices.end());
        out->backward_fn = [idx = std::move(idx)](Node& self) {
            auto& g = self.parents[0]->grad_buffer();
            for (std::size_t i = 0; i < idx.size(); ++i) g[idx[i]] += self.grad[i];
        };
    }
    return Tensor::from_node(out);
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets, std::span<const Real> weights) {
    if (logits.shape() != targets.shape()) {
        throw ShapeError("bce_with_logits: logits " + shape_string(logits.shape()) + " vs targets " +
                         shape_string(targets.shape()));
    }
    if (!weights.empty() && weights.size() != logits.size()) {
        throw ShapeError("bce_with_logits: weight length does not match logits");
    }
    const auto t = targets.data();
    for (Real v : t) {
        if (v != Real(0) && v != Real(1)) throw ValidationError("bce_with_logits: targets must be 0 or 1");
    }
    const auto x = logits.data();
    double total_w = 0.0, loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double v = x[i];
        loss += w * (std::max(v, 0.0) - v * t[i] + std::log1p(std::exp(-std::abs(v))));
        total_w += w;
    }
    if (total_w <= 0.0) throw ValidationError("bce_with_logits: empty or zero-weight input");

    auto out = make_result({1}, {&logits});
    out->data[0] = static_cast<Real>(loss / total_w);
    if (out->requires_grad) {
        std::vector<Real> w(weights.begin(), weights.end());
        std::vector<Real> tgt(t.begin(), t.end());
        out->backward_fn = [w = std::move(w), tgt = std::move(tgt), total_w](Node& self) {
            Node& p = *self.parents[0];
            auto& g = p.grad_buffer();
            const double scale = self.grad[0] / total_w;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double v = p.data[i];
                const double s = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
                const double wi = w.empty() ? 1.0 : w[i];
                g[i] += static_cast<Real>(scale * wi * (s - tgt[i]));
            }
        };
    }
    return Tensor::from_node(out);
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets) {
    return bce_with_logits(logits, targets, {});
}

}  // namespace hrx::nn
