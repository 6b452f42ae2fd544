#pragma once

#include <cstdint>
#include <vector>

#include "wavres/errors.hpp"
#include "wavres/image.hpp"

namespace wavres {

// Activation tensor, batch-major then channel, row-major planes.
struct Tensor4 {
    int batch = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(int b, int c, int h, int w, double fill = 0.0)
        : batch(b), channels(c), height(h), width(w),
          data(static_cast<std::size_t>(b) * c * h * w, fill) {
        if (b < 0 || c < 0 || h < 0 || w < 0)
            throw DimensionError("Tensor4: negative dimension");
    }

    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
    std::size_t size() const { return data.size(); }

    double* plane_ptr(int b, int c) {
        return data.data() + (static_cast<std::size_t>(b) * channels + c) * plane();
    }
    const double* plane_ptr(int b, int c) const {
        return data.data() + (static_cast<std::size_t>(b) * channels + c) * plane();
    }

    double& at(int b, int c, int h, int w_) { return plane_ptr(b, c)[h * width + w_]; }
    double at(int b, int c, int h, int w_) const { return plane_ptr(b, c)[h * width + w_]; }

    bool same_shape(const Tensor4& o) const {
        return batch == o.batch && channels == o.channels && height == o.height &&
               width == o.width;
    }
};

// Stacks single-channel images into a 1 x N x H x W tensor and back.
Tensor4 stack_to_tensor(const ImageStack& stack);
ImageStack tensor_to_stack(const Tensor4& t, int batch_index = 0);

}  // namespace wavres
