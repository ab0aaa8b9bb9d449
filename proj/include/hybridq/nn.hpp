#pragma once

#include <vector>

#include "hybridq/tensor.hpp"

namespace hybridq::nn {

// --- convolution -----------------------------------------------------------
// Cross-correlation convention (no kernel flip). input [C_in,H,W],
// kernels [C_out,C_in,k,k]; output [C_out,H',W'] with
// H' = (H + 2*padding - k)/stride + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernels, int stride, int padding);

struct Conv2dGrads {
    Tensor input;
    Tensor kernels;
};
Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& upstream, int stride, int padding);

// --- dense ------------------------------------------------------------------
// y = W x + b with W [m,n], x [n], b [m].
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct DenseGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;
};
DenseGrads dense_backward(const Tensor& input, const Tensor& weights,
                          const Tensor& upstream);

// --- activations -----------------------------------------------------------
// Elementwise; backward passes take the forward input. The derivative of
// leaky_relu/relu at exactly 0 is the positive-branch value 1.
Tensor leaky_relu(const Tensor& x, double slope = 0.2);
Tensor leaky_relu_backward(const Tensor& x, const Tensor& upstream, double slope = 0.2);
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& upstream);
Tensor tanh_act(const Tensor& x);
Tensor tanh_backward(const Tensor& x, const Tensor& upstream);
Tensor sigmoid(const Tensor& x);
Tensor sigmoid_backward(const Tensor& x, const Tensor& upstream);

// --- losses ------------------------------------------------------------------
// Numerically stable binary cross-entropy on a raw logit, target in {0,1}.
double bce_with_logits(double logit, int target);
double bce_with_logits_grad(double logit, int target);

// Mean squared error over all elements; gradient is w.r.t. `a`.
double mse(const Tensor& a, const Tensor& b);
Tensor mse_grad(const Tensor& a, const Tensor& b);

// --- Adam --------------------------------------------------------------------
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam step; updates param and state in place.
void adam_update(Tensor& param, const Tensor& grad, AdamState& state, double lr);
void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 AdamState& state, double lr);

}  // namespace hybridq::nn
