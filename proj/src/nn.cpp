#include "hybridq/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hybridq::nn {

namespace {

void check_conv_shapes(const Tensor& input, const Tensor& kernels, int stride,
                       int padding) {
    if (input.shape.size() != 3)
        throw std::invalid_argument("conv2d: input must be [C,H,W]");
    if (kernels.shape.size() != 4)
        throw std::invalid_argument("conv2d: kernels must be [C_out,C_in,k,k]");
    if (kernels.shape[1] != input.shape[0])
        throw std::invalid_argument("conv2d: kernel C_in does not match input");
    if (kernels.shape[2] != kernels.shape[3])
        throw std::invalid_argument("conv2d: only square kernels supported");
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (padding < 0) throw std::invalid_argument("conv2d: padding must be >= 0");
    const std::size_t k = kernels.shape[2];
    if (k > input.shape[1] + 2 * static_cast<std::size_t>(padding) ||
        k > input.shape[2] + 2 * static_cast<std::size_t>(padding))
        throw std::invalid_argument("conv2d: kernel larger than padded input");
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernels, int stride, int padding) {
    check_conv_shapes(input, kernels, stride, padding);
    const std::size_t c_out = kernels.shape[0];
    const std::size_t c_in = input.shape[0];
    const std::size_t h = input.shape[1];
    const std::size_t w = input.shape[2];
    const std::size_t k = kernels.shape[2];
    const std::size_t h_out = (h + 2 * padding - k) / stride + 1;
    const std::size_t w_out = (w + 2 * padding - k) / stride + 1;

    Tensor out({c_out, h_out, w_out});
    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t oh = 0; oh < h_out; ++oh) {
            for (std::size_t ow = 0; ow < w_out; ++ow) {
                double acc = 0.0;
                for (std::size_t c = 0; c < c_in; ++c) {
                    for (std::size_t u = 0; u < k; ++u) {
                        const long ih = static_cast<long>(oh) * stride + u - padding;
                        if (ih < 0 || ih >= static_cast<long>(h)) continue;
                        for (std::size_t v = 0; v < k; ++v) {
                            const long iw = static_cast<long>(ow) * stride + v - padding;
                            if (iw < 0 || iw >= static_cast<long>(w)) continue;
                            acc += kernels.data[((o * c_in + c) * k + u) * k + v] *
                                   input.at3(c, ih, iw);
                        }
                    }
                }
                out.at3(o, oh, ow) = acc;
            }
        }
    }
    return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& upstream, int stride, int padding) {
    check_conv_shapes(input, kernels, stride, padding);
    const std::size_t c_out = kernels.shape[0];
    const std::size_t c_in = input.shape[0];
    const std::size_t h = input.shape[1];
    const std::size_t w = input.shape[2];
    const std::size_t k = kernels.shape[2];
    const std::size_t h_out = (h + 2 * padding - k) / stride + 1;
    const std::size_t w_out = (w + 2 * padding - k) / stride + 1;
    upstream.require_shape({c_out, h_out, w_out}, "conv2d_backward upstream");

    Conv2dGrads grads{Tensor(input.shape), Tensor(kernels.shape)};
    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t oh = 0; oh < h_out; ++oh) {
            for (std::size_t ow = 0; ow < w_out; ++ow) {
                const double u_val = upstream.at3(o, oh, ow);
                if (u_val == 0.0) continue;
                for (std::size_t c = 0; c < c_in; ++c) {
                    for (std::size_t u = 0; u < k; ++u) {
                        const long ih = static_cast<long>(oh) * stride + u - padding;
                        if (ih < 0 || ih >= static_cast<long>(h)) continue;
                        for (std::size_t v = 0; v < k; ++v) {
                            const long iw = static_cast<long>(ow) * stride + v - padding;
                            if (iw < 0 || iw >= static_cast<long>(w)) continue;
                            const std::size_t kidx = ((o * c_in + c) * k + u) * k + v;
                            grads.kernels.data[kidx] += u_val * input.at3(c, ih, iw);
                            grads.input.at3(c, ih, iw) += u_val * kernels.data[kidx];
                        }
                    }
                }
            }
        }
    }
    return grads;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (weights.shape.size() != 2)
        throw std::invalid_argument("dense: weights must be [m,n]");
    const std::size_t m = weights.shape[0];
    const std::size_t n = weights.shape[1];
    if (input.numel() != n)
        throw std::invalid_argument("dense: input length " + std::to_string(input.numel()) +
                                    " != weight columns " + std::to_string(n));
    if (bias.numel() != m)
        throw std::invalid_argument("dense: bias length does not match weight rows");

    Tensor out({m});
    for (std::size_t i = 0; i < m; ++i) {
        double acc = bias.data[i];
        const double* row = &weights.data[i * n];
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * input.data[j];
        out.data[i] = acc;
    }
    return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights,
                          const Tensor& upstream) {
    const std::size_t m = weights.shape[0];
    const std::size_t n = weights.shape[1];
    if (upstream.numel() != m)
        throw std::invalid_argument("dense_backward: upstream length mismatch");
    if (input.numel() != n)
        throw std::invalid_argument("dense_backward: input length mismatch");

    DenseGrads grads{Tensor(input.shape), Tensor(weights.shape), Tensor({m})};
    for (std::size_t i = 0; i < m; ++i) {
        const double u = upstream.data[i];
        grads.bias.data[i] = u;
        double* wrow = &grads.weights.data[i * n];
        const double* row = &weights.data[i * n];
        for (std::size_t j = 0; j < n; ++j) {
            wrow[j] = u * input.data[j];
            grads.input.data[j] += u * row[j];
        }
    }
    return grads;
}

Tensor leaky_relu(const Tensor& x, double slope) {
    Tensor y = x;
    for (double& v : y.data) v = (v >= 0.0) ? v : slope * v;
    return y;
}

Tensor leaky_relu_backward(const Tensor& x, const Tensor& upstream, double slope) {
    if (!x.same_shape(upstream))
        throw std::invalid_argument("leaky_relu_backward: shape mismatch");
    Tensor g = upstream;
    for (std::size_t i = 0; i < g.numel(); ++i)
        if (x.data[i] < 0.0) g.data[i] *= slope;
    return g;
}

Tensor relu(const Tensor& x) { return leaky_relu(x, 0.0); }

Tensor relu_backward(const Tensor& x, const Tensor& upstream) {
    return leaky_relu_backward(x, upstream, 0.0);
}

Tensor tanh_act(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data) v = std::tanh(v);
    return y;
}

Tensor tanh_backward(const Tensor& x, const Tensor& upstream) {
    if (!x.same_shape(upstream))
        throw std::invalid_argument("tanh_backward: shape mismatch");
    Tensor g = upstream;
    for (std::size_t i = 0; i < g.numel(); ++i) {
        const double t = std::tanh(x.data[i]);
        g.data[i] *= 1.0 - t * t;
    }
    return g;
}

Tensor sigmoid(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
    return y;
}

Tensor sigmoid_backward(const Tensor& x, const Tensor& upstream) {
    if (!x.same_shape(upstream))
        throw std::invalid_argument("sigmoid_backward: shape mismatch");
    Tensor g = upstream;
    for (std::size_t i = 0; i < g.numel(); ++i) {
        const double s = 1.0 / (1.0 + std::exp(-x.data[i]));
        g.data[i] *= s * (1.0 - s);
    }
    return g;
}

double bce_with_logits(double logit, int target) {
    if (!std::isfinite(logit))
        throw std::invalid_argument("bce_with_logits: non-finite logit");
    if (target != 0 && target != 1)
        throw std::invalid_argument("bce_with_logits: target must be 0 or 1");
    return std::log1p(std::exp(-std::fabs(logit))) + std::max(logit, 0.0) -
           logit * target;
}

double bce_with_logits_grad(double logit, int target) {
    if (!std::isfinite(logit))
        throw std::invalid_argument("bce_with_logits_grad: non-finite logit");
    return 1.0 / (1.0 + std::exp(-logit)) - target;
}

double mse(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.numel());
}

Tensor mse_grad(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mse_grad: shape mismatch");
    Tensor g(a.shape);
    const double scale = 2.0 / static_cast<double>(a.numel());
    for (std::size_t i = 0; i < a.numel(); ++i)
        g.data[i] = scale * (a.data[i] - b.data[i]);
    return g;
}

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 AdamState& state, double lr) {
    if (param.size() != grad.size())
        throw std::invalid_argument("adam_update: param/grad shape mismatch");
    if (state.m.empty()) state = AdamState(param.size());
    if (state.m.size() != param.size())
        throw std::invalid_argument("adam_update: state shape mismatch");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

void adam_update(Tensor& param, const Tensor& grad, AdamState& state, double lr) {
    if (!param.same_shape(grad))
        throw std::invalid_argument("adam_update: param/grad shape mismatch");
    adam_update(param.data, grad.data, state, lr);
}

}  // namespace hybridq::nn
