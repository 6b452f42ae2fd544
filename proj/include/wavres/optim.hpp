#pragma once

#include <cstdint>
#include <vector>

#include "wavres/wavresnet.hpp"

namespace wavres {

// Mean squared error over all elements; grad = 2*(pred-label)/count.
double mse_loss(const Tensor4& pred, const Tensor4& label, Tensor4& grad);

// Variant that excludes whole channels from the loss (and zeroes their
// gradient); used by the direct-learning mode's lowpass bypass.
double mse_loss_masked(const Tensor4& pred, const Tensor4& label,
                       const std::vector<bool>& channel_active, Tensor4& grad);

// Element-wise symmetric clamp of every gradient array.
void clip_gradients(WavResNet& grads, double threshold);

// Geometric interpolation from lr_start at iteration 0 to lr_end at
// iteration `total`.
double lr_schedule(long iteration, long total, double lr_start = 0.01,
                   double lr_end = 1e-5);

// Plain SGD: p -= lr * g. Callers clip first; the composition realizes
// p <- p - lr * clip(g).
void sgd_step(WavResNet& params, WavResNet& grads, double lr);

// Optimizer state and per-evaluation convergence log.
struct TrainState {
    long iteration = 0;
    long total_iterations = 0;
    double lr = 0.01;
    double clip_threshold = 1e-3;
    std::uint64_t rng_seed = 0;
    struct LogEntry {
        long iteration;
        double lr;
        double train_loss;
        double val_psnr_db;
        double val_nrmse;
    };
    std::vector<LogEntry> convergence_log;
};

}  // namespace wavres
