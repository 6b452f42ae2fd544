#include "wavres/layers.hpp"

#include <algorithm>
#include <cmath>

namespace wavres {

Tensor4 conv2d_forward(const Tensor4& x, const ConvLayer& layer) {
    if (x.channels != layer.in_channels)
        throw DimensionError("conv2d_forward: input has " + std::to_string(x.channels) +
                             " channels, layer expects " + std::to_string(layer.in_channels));
    const int H = x.height, W = x.width;
    Tensor4 out(x.batch, layer.out_channels, H, W);

#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < x.batch; ++b) {
        for (int oc = 0; oc < layer.out_channels; ++oc) {
            double* op = out.plane_ptr(b, oc);
            const double bias = layer.bias[oc];
            for (int i = 0; i < H * W; ++i) op[i] = bias;
            for (int ic = 0; ic < layer.in_channels; ++ic) {
                const double* ip = x.plane_ptr(b, ic);
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const double w = layer.k(oc, ic, ky, kx);
                        if (w == 0.0) continue;
                        const int y0 = std::max(0, 1 - ky), y1 = std::min(H, H + 1 - ky);
                        const int x0 = std::max(0, 1 - kx), x1 = std::min(W, W + 1 - kx);
                        for (int y = y0; y < y1; ++y) {
                            double* orow = op + y * W;
                            const double* irow = ip + (y + ky - 1) * W + (kx - 1);
                            for (int xx = x0; xx < x1; ++xx) orow[xx] += w * irow[xx];
                        }
                    }
                }
            }
        }
    }
    return out;
}

void conv2d_backward(const Tensor4& x, const ConvLayer& layer, const Tensor4& grad_out,
                     Tensor4& grad_x, ConvLayer& grad_layer) {
    if (x.channels != layer.in_channels || grad_out.channels != layer.out_channels ||
        grad_out.batch != x.batch || grad_out.height != x.height || grad_out.width != x.width)
        throw DimensionError("conv2d_backward: shape mismatch");
    const int H = x.height, W = x.width;

    grad_x = Tensor4(x.batch, x.channels, H, W);
    grad_layer = ConvLayer(layer.in_channels, layer.out_channels);

    // input gradient: full correlation with the flipped kernel
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < x.batch; ++b) {
        for (int ic = 0; ic < layer.in_channels; ++ic) {
            double* gp = grad_x.plane_ptr(b, ic);
            for (int oc = 0; oc < layer.out_channels; ++oc) {
                const double* gop = grad_out.plane_ptr(b, oc);
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const double w = layer.k(oc, ic, ky, kx);
                        if (w == 0.0) continue;
                        // out[y][x] consumed in[y+ky-1][x+kx-1]
                        const int y0 = std::max(0, 1 - ky), y1 = std::min(H, H + 1 - ky);
                        const int x0 = std::max(0, 1 - kx), x1 = std::min(W, W + 1 - kx);
                        for (int y = y0; y < y1; ++y) {
                            double* grow = gp + (y + ky - 1) * W + (kx - 1);
                            const double* gorow = gop + y * W;
                            for (int xx = x0; xx < x1; ++xx) grow[xx] += w * gorow[xx];
                        }
                    }
                }
            }
        }
    }

    // kernel and bias gradients
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < layer.out_channels; ++oc) {
        double bias_acc = 0.0;
        for (int b = 0; b < x.batch; ++b) {
            const double* gop = grad_out.plane_ptr(b, oc);
            for (int i = 0; i < H * W; ++i) bias_acc += gop[i];
            for (int ic = 0; ic < layer.in_channels; ++ic) {
                const double* ip = x.plane_ptr(b, ic);
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const int y0 = std::max(0, 1 - ky), y1 = std::min(H, H + 1 - ky);
                        const int x0 = std::max(0, 1 - kx), x1 = std::min(W, W + 1 - kx);
                        double acc = 0.0;
                        for (int y = y0; y < y1; ++y) {
                            const double* gorow = gop + y * W;
                            const double* irow = ip + (y + ky - 1) * W + (kx - 1);
                            for (int xx = x0; xx < x1; ++xx) acc += gorow[xx] * irow[xx];
                        }
                        grad_layer.k(oc, ic, ky, kx) += acc;
                    }
                }
            }
        }
        grad_layer.bias[oc] = bias_acc;
    }
}

Tensor4 batchnorm_forward(const Tensor4& x, BatchNormLayer& layer, NetMode mode,
                          BatchNormCache* cache) {
    if (x.channels != layer.channels)
        throw DimensionError("batchnorm_forward: channel mismatch");
    const std::size_t per_channel = static_cast<std::size_t>(x.batch) * x.plane();
    if (mode == NetMode::Train && per_channel < 2)
        throw StateError("batchnorm_forward: train mode needs at least 2 samples per channel");

    Tensor4 out(x.batch, x.channels, x.height, x.width);
    if (cache) {
        cache->x_hat = Tensor4(x.batch, x.channels, x.height, x.width);
        cache->inv_std.assign(layer.channels, 0.0);
        cache->mode = mode;
        cache->valid = true;
    }

    for (int c = 0; c < layer.channels; ++c) {
        double mean, var;
        if (mode == NetMode::Train) {
            double sum = 0.0;
            for (int b = 0; b < x.batch; ++b) {
                const double* p = x.plane_ptr(b, c);
                for (std::size_t i = 0; i < x.plane(); ++i) sum += p[i];
            }
            mean = sum / static_cast<double>(per_channel);
            double sq = 0.0;
            for (int b = 0; b < x.batch; ++b) {
                const double* p = x.plane_ptr(b, c);
                for (std::size_t i = 0; i < x.plane(); ++i) {
                    const double d = p[i] - mean;
                    sq += d * d;
                }
            }
            var = sq / static_cast<double>(per_channel);
            layer.running_mean[c] = layer.momentum * layer.running_mean[c] +
                                    (1.0 - layer.momentum) * mean;
            layer.running_var[c] =
                layer.momentum * layer.running_var[c] + (1.0 - layer.momentum) * var;
        } else {
            mean = layer.running_mean[c];
            var = layer.running_var[c];
        }
        const double inv_std = 1.0 / std::sqrt(var + layer.epsilon);
        if (cache) cache->inv_std[c] = inv_std;
        const double g = layer.scale[c];
        const double s = layer.shift[c];
        for (int b = 0; b < x.batch; ++b) {
            const double* p = x.plane_ptr(b, c);
            double* o = out.plane_ptr(b, c);
            double* xh = cache ? cache->x_hat.plane_ptr(b, c) : nullptr;
            for (std::size_t i = 0; i < x.plane(); ++i) {
                const double hat = (p[i] - mean) * inv_std;
                if (xh) xh[i] = hat;
                o[i] = g * hat + s;
            }
        }
    }
    return out;
}

void batchnorm_backward(const BatchNormCache& cache, const BatchNormLayer& layer,
                        const Tensor4& grad_out, Tensor4& grad_x,
                        std::vector<double>& grad_scale, std::vector<double>& grad_shift) {
    if (!cache.valid || cache.mode != NetMode::Train)
        throw StateError("batchnorm_backward: cache missing or not from train mode");
    if (!grad_out.same_shape(cache.x_hat))
        throw DimensionError("batchnorm_backward: gradient shape mismatch");

    const Tensor4& x_hat = cache.x_hat;
    const double n = static_cast<double>(static_cast<std::size_t>(x_hat.batch) * x_hat.plane());
    grad_x = Tensor4(x_hat.batch, x_hat.channels, x_hat.height, x_hat.width);
    grad_scale.assign(layer.channels, 0.0);
    grad_shift.assign(layer.channels, 0.0);

    for (int c = 0; c < layer.channels; ++c) {
        double sum_g = 0.0;     // sum of grad_out
        double sum_gx = 0.0;    // sum of grad_out * x_hat
        for (int b = 0; b < x_hat.batch; ++b) {
            const double* go = grad_out.plane_ptr(b, c);
            const double* xh = x_hat.plane_ptr(b, c);
            for (std::size_t i = 0; i < x_hat.plane(); ++i) {
                sum_g += go[i];
                sum_gx += go[i] * xh[i];
            }
        }
        grad_shift[c] = sum_g;
        grad_scale[c] = sum_gx;
        const double k = layer.scale[c] * cache.inv_std[c] / n;
        for (int b = 0; b < x_hat.batch; ++b) {
            const double* go = grad_out.plane_ptr(b, c);
            const double* xh = x_hat.plane_ptr(b, c);
            double* gx = grad_x.plane_ptr(b, c);
            for (std::size_t i = 0; i < x_hat.plane(); ++i)
                gx[i] = k * (n * go[i] - sum_g - xh[i] * sum_gx);
        }
    }
}

Tensor4 relu_forward(const Tensor4& x) {
    Tensor4 out(x.batch, x.channels, x.height, x.width);
    for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
    return out;
}

Tensor4 relu_backward(const Tensor4& x, const Tensor4& grad_out) {
    if (!x.same_shape(grad_out)) throw DimensionError("relu_backward: shape mismatch");
    Tensor4 out(x.batch, x.channels, x.height, x.width);
    for (std::size_t i = 0; i < x.size(); ++i)
        out.data[i] = x.data[i] > 0.0 ? grad_out.data[i] : 0.0;
    return out;
}

Tensor4 concat_forward(const std::vector<const Tensor4*>& inputs) {
    if (inputs.empty()) throw DimensionError("concat_forward: no inputs");
    int total = 0;
    for (const Tensor4* t : inputs) {
        if (t->batch != inputs[0]->batch || t->height != inputs[0]->height ||
            t->width != inputs[0]->width)
            throw DimensionError("concat_forward: batch/spatial dims differ");
        total += t->channels;
    }
    Tensor4 out(inputs[0]->batch, total, inputs[0]->height, inputs[0]->width);
    for (int b = 0; b < out.batch; ++b) {
        int c_base = 0;
        for (const Tensor4* t : inputs) {
            for (int c = 0; c < t->channels; ++c) {
                const double* src = t->plane_ptr(b, c);
                std::copy(src, src + t->plane(), out.plane_ptr(b, c_base + c));
            }
            c_base += t->channels;
        }
    }
    return out;
}

std::vector<Tensor4> concat_backward(const Tensor4& grad_out,
                                     const std::vector<int>& channel_splits) {
    int total = 0;
    for (int c : channel_splits) total += c;
    if (total != grad_out.channels)
        throw DimensionError("concat_backward: splits do not sum to channel count");
    std::vector<Tensor4> grads;
    grads.reserve(channel_splits.size());
    int c_base = 0;
    for (int ch : channel_splits) {
        Tensor4 g(grad_out.batch, ch, grad_out.height, grad_out.width);
        for (int b = 0; b < grad_out.batch; ++b)
            for (int c = 0; c < ch; ++c) {
                const double* src = grad_out.plane_ptr(b, c_base + c);
                std::copy(src, src + grad_out.plane(), g.plane_ptr(b, c));
            }
        grads.push_back(std::move(g));
        c_base += ch;
    }
    return grads;
}

}  // namespace wavres
