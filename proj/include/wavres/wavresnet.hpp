#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wavres/layers.hpp"

namespace wavres {

// Shape of the 24-conv residual network: an input conv, `modules`
// residual modules of `convs_per_module` conv+BN+ReLU stages with a
// post-addition ReLU bypass, channel concatenation of the initial feature
// map and every module output, `post_convs` fusion convs, and a bare
// output conv back to coefficient space.
struct TopologyConfig {
    int in_bands = 15;
    int channels = 128;
    int modules = 6;
    int convs_per_module = 3;
    int post_convs = 4;
    // Feature normalization applied to coefficients at the network
    // boundary; travels with the checkpoint so training and inference
    // agree.
    double coeff_scale = 1.0;

    int conv_count() const { return 1 + modules * convs_per_module + post_convs + 1; }
    int concat_channels() const { return (modules + 1) * channels; }
    void validate() const;
    std::string serialize() const;
    static TopologyConfig parse(const std::string& text);
    bool operator==(const TopologyConfig&) const = default;
};

// Everything the backward pass needs from a forward pass.
struct NetWorkspace {
    Tensor4 input;
    BatchNormCache bn_in_cache;
    Tensor4 bn_in_out;                  // pre-ReLU, provides the ReLU mask

    std::vector<Tensor4> conv_inputs;   // per module conv, the tensor fed to it
    std::vector<BatchNormCache> bn_caches;
    std::vector<Tensor4> bn_outs;       // pre-ReLU per module conv
    std::vector<Tensor4> module_sums;   // pre-ReLU bypass sums

    std::vector<Tensor4> post_inputs;
    std::vector<BatchNormCache> post_bn_caches;
    std::vector<Tensor4> post_bn_outs;
    Tensor4 post_out;
};

class WavResNet {
public:
    TopologyConfig topology;

    ConvLayer conv_in;
    BatchNormLayer bn_in;
    std::vector<ConvLayer> module_convs;      // modules * convs_per_module
    std::vector<BatchNormLayer> module_bns;
    std::vector<ConvLayer> post_conv_layers;  // post_convs
    std::vector<BatchNormLayer> post_bn_layers;
    ConvLayer conv_out;

    WavResNet() = default;
    // Builds the layer structure: zero kernels and biases, unit BN scale.
    explicit WavResNet(const TopologyConfig& topo);

    // He-initialized kernels, unit BN scale, everything else zero.
    static WavResNet initialize(const TopologyConfig& topo, std::uint64_t seed);

    // All-zero state; the right container for accumulating gradients.
    static WavResNet zeros(const TopologyConfig& topo);

    std::size_t parameter_count() const;  // learnable scalars only

    // Train mode requires a workspace (it caches activations for
    // backward) and updates BN running stats.
    Tensor4 forward(const Tensor4& x, NetMode mode, NetWorkspace* ws = nullptr);

    // Reverse-mode gradients for every learnable parameter; `grads` is a
    // zero-initialized network of the same topology, overwritten here.
    // Returns the gradient with respect to the input.
    Tensor4 backward(const NetWorkspace& ws, const Tensor4& grad_out, WavResNet& grads);

    // Visits every learnable array in declaration order (conv kernels,
    // conv bias, BN scale, BN shift).
    void visit_learnable(const std::function<void(std::vector<double>&)>& fn);
    // Also includes BN running stats; this is the checkpoint order.
    void visit_state(const std::function<void(std::vector<double>&)>& fn);
};

// Checkpoint format "WRN1": magic, version u16 LE, length-prefixed
// topology text, per-array binary64 LE payloads each prefixed with a u32
// element count, trailing CRC32 of everything after the magic.
void save_checkpoint(const std::string& path, WavResNet& net);
WavResNet load_checkpoint(const std::string& path);

}  // namespace wavres
