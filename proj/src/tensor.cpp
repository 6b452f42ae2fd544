#include "wavres/tensor.hpp"

namespace wavres {

Tensor4 stack_to_tensor(const ImageStack& stack) {
    if (stack.empty()) throw DimensionError("stack_to_tensor: empty stack");
    const int h = stack[0].height;
    const int w = stack[0].width;
    Tensor4 t(1, static_cast<int>(stack.size()), h, w);
    for (std::size_t ch = 0; ch < stack.size(); ++ch) {
        if (stack[ch].height != h || stack[ch].width != w)
            throw DimensionError("stack_to_tensor: band shapes differ");
        std::copy(stack[ch].data.begin(), stack[ch].data.end(),
                  t.plane_ptr(0, static_cast<int>(ch)));
    }
    return t;
}

ImageStack tensor_to_stack(const Tensor4& t, int batch_index) {
    if (batch_index < 0 || batch_index >= t.batch)
        throw DimensionError("tensor_to_stack: batch index out of range");
    ImageStack stack;
    stack.reserve(t.channels);
    for (int c = 0; c < t.channels; ++c) {
        Image band(t.height, t.width);
        const double* p = t.plane_ptr(batch_index, c);
        std::copy(p, p + t.plane(), band.data.begin());
        stack.push_back(std::move(band));
    }
    return stack;
}

}  // namespace wavres
