#pragma once

#include <cstdint>
#include <vector>

#include "wavres/tensor.hpp"

namespace wavres {

enum class NetMode { Train, Infer };

// 3x3 convolution, zero padding 1, stride 1 (cross-correlation plus bias;
// output spatial size equals input).
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> kernels;  // oc * ic * 3 * 3
    std::vector<double> bias;     // oc

    ConvLayer() = default;
    ConvLayer(int in_ch, int out_ch)
        : in_channels(in_ch), out_channels(out_ch),
          kernels(static_cast<std::size_t>(out_ch) * in_ch * 9, 0.0), bias(out_ch, 0.0) {}

    double& k(int oc, int ic, int ky, int kx) {
        return kernels[((static_cast<std::size_t>(oc) * in_channels + ic) * 3 + ky) * 3 + kx];
    }
    double k(int oc, int ic, int ky, int kx) const {
        return kernels[((static_cast<std::size_t>(oc) * in_channels + ic) * 3 + ky) * 3 + kx];
    }
};

Tensor4 conv2d_forward(const Tensor4& x, const ConvLayer& layer);
// Exact gradients of the forward map; grad_layer is overwritten.
void conv2d_backward(const Tensor4& x, const ConvLayer& layer, const Tensor4& grad_out,
                     Tensor4& grad_x, ConvLayer& grad_layer);

struct BatchNormLayer {
    int channels = 0;
    std::vector<double> scale;
    std::vector<double> shift;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double epsilon = 1e-5;
    double momentum = 0.9;  // keep-fraction of the existing running stats

    BatchNormLayer() = default;
    explicit BatchNormLayer(int ch)
        : channels(ch), scale(ch, 1.0), shift(ch, 0.0), running_mean(ch, 0.0),
          running_var(ch, 1.0) {}
};

// Saved forward state needed by the backward pass.
struct BatchNormCache {
    Tensor4 x_hat;
    std::vector<double> inv_std;
    NetMode mode = NetMode::Infer;
    bool valid = false;
};

// Train mode normalizes by batch statistics (biased variance over
// batch*height*width per channel) and updates the running stats; infer
// mode uses the running stats. Train mode requires at least 2 samples
// per channel.
Tensor4 batchnorm_forward(const Tensor4& x, BatchNormLayer& layer, NetMode mode,
                          BatchNormCache* cache = nullptr);
// Gradient of the train-mode forward, including the dependence of the
// batch statistics on x.
void batchnorm_backward(const BatchNormCache& cache, const BatchNormLayer& layer,
                        const Tensor4& grad_out, Tensor4& grad_x,
                        std::vector<double>& grad_scale, std::vector<double>& grad_shift);

Tensor4 relu_forward(const Tensor4& x);
// Subgradient 0 at exactly 0.
Tensor4 relu_backward(const Tensor4& x, const Tensor4& grad_out);

Tensor4 concat_forward(const std::vector<const Tensor4*>& inputs);
std::vector<Tensor4> concat_backward(const Tensor4& grad_out,
                                     const std::vector<int>& channel_splits);

}  // namespace wavres
