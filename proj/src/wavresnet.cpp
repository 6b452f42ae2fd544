#include "wavres/wavresnet.hpp"

#include <cmath>
#include <sstream>

#include "wavres/rng.hpp"

namespace wavres {

void TopologyConfig::validate() const {
    if (in_bands < 1 || channels < 1 || modules < 1 || convs_per_module < 1 || post_convs < 1)
        throw ParameterError("TopologyConfig: all counts must be >= 1");
    if (!(coeff_scale > 0.0)) throw ParameterError("TopologyConfig: coeff_scale must be > 0");
}

std::string TopologyConfig::serialize() const {
    std::ostringstream out;
    char scale[32];
    std::snprintf(scale, sizeof scale, "%.17g", coeff_scale);
    out << "in_bands=" << in_bands << " channels=" << channels << " modules=" << modules
        << " convs_per_module=" << convs_per_module << " post_convs=" << post_convs
        << " coeff_scale=" << scale << " bypass=post_add_relu";
    return out.str();
}

TopologyConfig TopologyConfig::parse(const std::string& text) {
    TopologyConfig topo;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "in_bands") topo.in_bands = std::stoi(value);
        else if (key == "channels") topo.channels = std::stoi(value);
        else if (key == "modules") topo.modules = std::stoi(value);
        else if (key == "convs_per_module") topo.convs_per_module = std::stoi(value);
        else if (key == "post_convs") topo.post_convs = std::stoi(value);
        else if (key == "coeff_scale") topo.coeff_scale = std::stod(value);
        else if (key == "bypass" && value != "post_add_relu")
            throw FormatError("TopologyConfig: unknown bypass variant " + value, 0);
    }
    topo.validate();
    return topo;
}

WavResNet::WavResNet(const TopologyConfig& topo) : topology(topo) {
    topo.validate();
    conv_in = ConvLayer(topo.in_bands, topo.channels);
    bn_in = BatchNormLayer(topo.channels);
    for (int m = 0; m < topo.modules; ++m)
        for (int j = 0; j < topo.convs_per_module; ++j) {
            module_convs.emplace_back(topo.channels, topo.channels);
            module_bns.emplace_back(topo.channels);
        }
    for (int j = 0; j < topo.post_convs; ++j) {
        const int in_ch = j == 0 ? topo.concat_channels() : topo.channels;
        post_conv_layers.emplace_back(in_ch, topo.channels);
        post_bn_layers.emplace_back(topo.channels);
    }
    conv_out = ConvLayer(topo.channels, topo.in_bands);
}

WavResNet WavResNet::initialize(const TopologyConfig& topo, std::uint64_t seed) {
    WavResNet net(topo);
    Rng rng = Rng::stream(seed, 0x11EEu);
    auto he_fill = [&rng](ConvLayer& layer) {
        const double std_dev = std::sqrt(2.0 / (9.0 * layer.in_channels));
        for (double& w : layer.kernels) w = std_dev * rng.normal();
    };
    he_fill(net.conv_in);
    for (ConvLayer& layer : net.module_convs) he_fill(layer);
    for (ConvLayer& layer : net.post_conv_layers) he_fill(layer);
    he_fill(net.conv_out);
    return net;
}

WavResNet WavResNet::zeros(const TopologyConfig& topo) {
    WavResNet net(topo);
    net.visit_state([](std::vector<double>& arr) {
        std::fill(arr.begin(), arr.end(), 0.0);
    });
    return net;
}

std::size_t WavResNet::parameter_count() const {
    std::size_t count = 0;
    const_cast<WavResNet*>(this)->visit_learnable(
        [&count](std::vector<double>& arr) { count += arr.size(); });
    return count;
}

void WavResNet::visit_learnable(const std::function<void(std::vector<double>&)>& fn) {
    auto conv = [&fn](ConvLayer& c) {
        fn(c.kernels);
        fn(c.bias);
    };
    auto bn = [&fn](BatchNormLayer& b) {
        fn(b.scale);
        fn(b.shift);
    };
    conv(conv_in);
    bn(bn_in);
    for (std::size_t i = 0; i < module_convs.size(); ++i) {
        conv(module_convs[i]);
        bn(module_bns[i]);
    }
    for (std::size_t i = 0; i < post_conv_layers.size(); ++i) {
        conv(post_conv_layers[i]);
        bn(post_bn_layers[i]);
    }
    conv(conv_out);
}

void WavResNet::visit_state(const std::function<void(std::vector<double>&)>& fn) {
    auto conv = [&fn](ConvLayer& c) {
        fn(c.kernels);
        fn(c.bias);
    };
    auto bn = [&fn](BatchNormLayer& b) {
        fn(b.scale);
        fn(b.shift);
        fn(b.running_mean);
        fn(b.running_var);
    };
    conv(conv_in);
    bn(bn_in);
    for (std::size_t i = 0; i < module_convs.size(); ++i) {
        conv(module_convs[i]);
        bn(module_bns[i]);
    }
    for (std::size_t i = 0; i < post_conv_layers.size(); ++i) {
        conv(post_conv_layers[i]);
        bn(post_bn_layers[i]);
    }
    conv(conv_out);
}

namespace {

Tensor4 add_tensors(const Tensor4& a, const Tensor4& b) {
    if (!a.same_shape(b)) throw DimensionError("bypass add: shape mismatch");
    Tensor4 out(a.batch, a.channels, a.height, a.width);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

}  // namespace

Tensor4 WavResNet::forward(const Tensor4& x, NetMode mode, NetWorkspace* ws) {
    if (x.channels != topology.in_bands)
        throw DimensionError("WavResNet::forward: expected " +
                             std::to_string(topology.in_bands) + " input channels, got " +
                             std::to_string(x.channels));
    if (x.height < 3 || x.width < 3)
        throw DimensionError("WavResNet::forward: spatial dims must be >= 3");
    if (mode == NetMode::Train && ws == nullptr)
        throw StateError("WavResNet::forward: train mode requires a workspace");

    if (ws) {
        *ws = NetWorkspace{};
        ws->input = x;
    }

    Tensor4 t = conv2d_forward(x, conv_in);
    Tensor4 bn_out = batchnorm_forward(t, bn_in, mode, ws ? &ws->bn_in_cache : nullptr);
    if (ws) ws->bn_in_out = bn_out;
    Tensor4 feat0 = relu_forward(bn_out);

    std::vector<Tensor4> module_outputs;
    module_outputs.reserve(topology.modules);
    Tensor4 current = feat0;
    int conv_index = 0;
    for (int m = 0; m < topology.modules; ++m) {
        const Tensor4 module_input = current;
        Tensor4 inner = module_input;
        for (int j = 0; j < topology.convs_per_module; ++j, ++conv_index) {
            if (ws) ws->conv_inputs.push_back(inner);
            Tensor4 c = conv2d_forward(inner, module_convs[conv_index]);
            BatchNormCache* cache = nullptr;
            if (ws) {
                ws->bn_caches.emplace_back();
                cache = &ws->bn_caches.back();
            }
            Tensor4 bnv = batchnorm_forward(c, module_bns[conv_index], mode, cache);
            if (ws) ws->bn_outs.push_back(bnv);
            inner = relu_forward(bnv);
        }
        Tensor4 sum = add_tensors(inner, module_input);
        if (ws) ws->module_sums.push_back(sum);
        current = relu_forward(sum);
        module_outputs.push_back(current);
    }

    std::vector<const Tensor4*> concat_inputs;
    concat_inputs.push_back(&feat0);
    for (const Tensor4& mo : module_outputs) concat_inputs.push_back(&mo);
    Tensor4 cat = concat_forward(concat_inputs);

    Tensor4 post = std::move(cat);
    for (int j = 0; j < topology.post_convs; ++j) {
        if (ws) ws->post_inputs.push_back(post);
        Tensor4 c = conv2d_forward(post, post_conv_layers[j]);
        BatchNormCache* cache = nullptr;
        if (ws) {
            ws->post_bn_caches.emplace_back();
            cache = &ws->post_bn_caches.back();
        }
        Tensor4 bnv = batchnorm_forward(c, post_bn_layers[j], mode, cache);
        if (ws) ws->post_bn_outs.push_back(bnv);
        post = relu_forward(bnv);
    }
    if (ws) ws->post_out = post;

    return conv2d_forward(post, conv_out);
}

Tensor4 WavResNet::backward(const NetWorkspace& ws, const Tensor4& grad_out,
                            WavResNet& grads) {
    if (!(grads.topology == topology))
        throw StateError("WavResNet::backward: gradient container topology mismatch");

    // output conv
    Tensor4 grad_post;
    conv2d_backward(ws.post_out, conv_out, grad_out, grad_post, grads.conv_out);

    // post-concatenation stack, in reverse
    for (int j = topology.post_convs - 1; j >= 0; --j) {
        Tensor4 grad_bn = relu_backward(ws.post_bn_outs[j], grad_post);
        Tensor4 grad_conv;
        batchnorm_backward(ws.post_bn_caches[j], post_bn_layers[j], grad_bn, grad_conv,
                           grads.post_bn_layers[j].scale, grads.post_bn_layers[j].shift);
        Tensor4 grad_in;
        conv2d_backward(ws.post_inputs[j], post_conv_layers[j], grad_conv, grad_in,
                        grads.post_conv_layers[j]);
        grad_post = std::move(grad_in);
    }

    // split the concat gradient into feat0 + module output blocks
    std::vector<int> splits(static_cast<std::size_t>(topology.modules) + 1,
                            topology.channels);
    std::vector<Tensor4> block_grads = concat_backward(grad_post, splits);

    // walk the module chain backwards; each module output also feeds the
    // next module, so gradients accumulate block + chain contributions
    Tensor4 grad_chain = std::move(block_grads[topology.modules]);  // into module_outs.back()
    int conv_index = topology.modules * topology.convs_per_module - 1;
    for (int m = topology.modules - 1; m >= 0; --m) {
        // through the post-addition ReLU
        Tensor4 grad_sum = relu_backward(ws.module_sums[m], grad_chain);
        // bypass: gradient flows to the module input directly ...
        Tensor4 grad_module_input = grad_sum;
        // ... and through the conv stack
        Tensor4 grad_inner = grad_sum;
        for (int j = topology.convs_per_module - 1; j >= 0; --j, --conv_index) {
            const std::size_t idx = static_cast<std::size_t>(conv_index);
            Tensor4 after_relu =
                relu_backward(ws.bn_outs[idx], grad_inner);
            Tensor4 grad_conv;
            batchnorm_backward(ws.bn_caches[idx], module_bns[idx], after_relu, grad_conv,
                               grads.module_bns[idx].scale, grads.module_bns[idx].shift);
            Tensor4 grad_in;
            conv2d_backward(ws.conv_inputs[idx], module_convs[idx], grad_conv, grad_in,
                            grads.module_convs[idx]);
            grad_inner = std::move(grad_in);
        }
        for (std::size_t i = 0; i < grad_module_input.size(); ++i)
            grad_module_input.data[i] += grad_inner.data[i];
        // module input is the previous module's output (or feat0): add the
        // concat block gradient for that producer
        if (m > 0) {
            Tensor4& prev_block = block_grads[m];  // block for module_outs[m-1]
            for (std::size_t i = 0; i < grad_module_input.size(); ++i)
                grad_module_input.data[i] += prev_block.data[i];
        }
        grad_chain = std::move(grad_module_input);
    }

    // feat0 receives the chain gradient plus its own concat block
    Tensor4 grad_feat0 = std::move(grad_chain);
    for (std::size_t i = 0; i < grad_feat0.size(); ++i)
        grad_feat0.data[i] += block_grads[0].data[i];

    Tensor4 grad_bn_in = relu_backward(ws.bn_in_out, grad_feat0);
    Tensor4 grad_conv_in_out;
    batchnorm_backward(ws.bn_in_cache, bn_in, grad_bn_in, grad_conv_in_out,
                       grads.bn_in.scale, grads.bn_in.shift);
    Tensor4 grad_input;
    conv2d_backward(ws.input, conv_in, grad_conv_in_out, grad_input, grads.conv_in);
    return grad_input;
}

}  // namespace wavres
