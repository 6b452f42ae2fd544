#include "wavres/optim.hpp"

#include <cmath>

namespace wavres {

double mse_loss(const Tensor4& pred, const Tensor4& label, Tensor4& grad) {
    if (!pred.same_shape(label)) throw DimensionError("mse_loss: shape mismatch");
    grad = Tensor4(pred.batch, pred.channels, pred.height, pred.width);
    const double inv_count = 1.0 / static_cast<double>(pred.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - label.data[i];
        acc += d * d;
        grad.data[i] = 2.0 * d * inv_count;
    }
    return acc * inv_count;
}

double mse_loss_masked(const Tensor4& pred, const Tensor4& label,
                       const std::vector<bool>& channel_active, Tensor4& grad) {
    if (!pred.same_shape(label)) throw DimensionError("mse_loss_masked: shape mismatch");
    if (static_cast<int>(channel_active.size()) != pred.channels)
        throw DimensionError("mse_loss_masked: mask length mismatch");
    grad = Tensor4(pred.batch, pred.channels, pred.height, pred.width, 0.0);
    std::size_t active = 0;
    for (bool a : channel_active)
        if (a) ++active;
    if (active == 0) throw ParameterError("mse_loss_masked: no active channels");
    const double inv_count =
        1.0 / (static_cast<double>(pred.batch) * active * pred.plane());
    double acc = 0.0;
    for (int b = 0; b < pred.batch; ++b)
        for (int c = 0; c < pred.channels; ++c) {
            if (!channel_active[c]) continue;
            const double* p = pred.plane_ptr(b, c);
            const double* l = label.plane_ptr(b, c);
            double* g = grad.plane_ptr(b, c);
            for (std::size_t i = 0; i < pred.plane(); ++i) {
                const double d = p[i] - l[i];
                acc += d * d;
                g[i] = 2.0 * d * inv_count;
            }
        }
    return acc * inv_count;
}

void clip_gradients(WavResNet& grads, double threshold) {
    if (threshold <= 0.0) throw ParameterError("clip_gradients: threshold must be > 0");
    grads.visit_learnable([threshold](std::vector<double>& arr) {
        for (double& g : arr) {
            if (g > threshold) g = threshold;
            else if (g < -threshold) g = -threshold;
        }
    });
}

double lr_schedule(long iteration, long total, double lr_start, double lr_end) {
    if (total < 1) throw ParameterError("lr_schedule: total must be >= 1");
    if (lr_start <= 0.0 || lr_end <= 0.0)
        throw ParameterError("lr_schedule: rates must be positive");
    const double t = static_cast<double>(iteration) / static_cast<double>(total);
    return lr_start * std::pow(lr_end / lr_start, t);
}

void sgd_step(WavResNet& params, WavResNet& grads, double lr) {
    if (!(params.topology == grads.topology))
        throw StateError("sgd_step: parameter/gradient topology mismatch");
    std::vector<std::vector<double>*> param_arrays;
    params.visit_learnable([&](std::vector<double>& arr) { param_arrays.push_back(&arr); });
    std::size_t cursor = 0;
    grads.visit_learnable([&](std::vector<double>& garr) {
        std::vector<double>& parr = *param_arrays[cursor++];
        for (std::size_t i = 0; i < parr.size(); ++i) parr[i] -= lr * garr[i];
    });
}

}  // namespace wavres
