#include "awa/network.hpp"

#include <nlohmann/json.hpp>

namespace awa {

using json = nlohmann::json;

NetworkModel::NetworkModel(Shape input, std::vector<LayerPtr> layers, uint64_t param_seed)
    : input_(input), layers_(std::move(layers)) {
    if (layers_.empty()) throw ShapeError("network needs at least one layer");

    int w_total = 0, s_total = 0;
    Shape cur = input_;
    for (const auto& layer : layers_) {
        in_shapes_.push_back(cur);
        w_offset_.push_back(w_total);
        w_count_.push_back(layer->param_count());
        s_offset_.push_back(s_total);
        s_count_.push_back(layer->state_count());
        w_total += layer->param_count();
        s_total += layer->state_count();
        cur = layer->out_shape();
    }
    params_ = Eigen::VectorXd::Zero(w_total);
    state_ = Eigen::VectorXd::Zero(s_total);

    Rng rng(param_seed);
    for (size_t i = 0; i < layers_.size(); ++i) {
        if (w_count_[i] > 0)
            layers_[i]->init_params(
                std::span<double>(params_.data() + w_offset_[i], static_cast<size_t>(w_count_[i])),
                rng);
        if (s_count_[i] > 0)
            layers_[i]->init_state(
                std::span<double>(state_.data() + s_offset_[i], static_cast<size_t>(s_count_[i])));
    }
}

Shape NetworkModel::output_shape() const { return layers_.back()->out_shape(); }

bool NetworkModel::has_prob_head() const { return layers_.back()->is_prob_head(); }

ForwardResult NetworkModel::run(const Tensor& x, Mode mode, NetworkCache* cache) const {
    if (x.shape != input_)
        throw ShapeError("network input shape mismatch: got " +
                         std::to_string(x.shape.channels) + "x" + std::to_string(x.shape.length) +
                         ", expected " + std::to_string(input_.channels) + "x" +
                         std::to_string(input_.length));
    if (cache) {
        cache->layers.clear();
        cache->layers.resize(layers_.size());
    }
    ForwardResult res;
    Tensor cur = x;
    for (size_t i = 0; i < layers_.size(); ++i) {
        std::span<const double> w(params_.data() + w_offset_[i], static_cast<size_t>(w_count_[i]));
        // Running statistics are written only in Train mode; the const_cast is
        // confined to that path, which is only reachable through the
        // non-const forward().
        std::span<double> s(const_cast<double*>(state_.data()) + s_offset_[i],
                            static_cast<size_t>(s_count_[i]));
        if (i + 1 == layers_.size() && layers_[i]->is_prob_head()) res.logits = cur;
        cur = layers_[i]->forward(w, s, cur, mode, cache ? &cache->layers[i] : nullptr);
    }
    res.output = std::move(cur);
    if (!has_prob_head()) res.logits = res.output;
    return res;
}

ForwardResult NetworkModel::forward(const Tensor& x, NetworkCache* cache) {
    return run(x, Mode::Train, cache);
}

ForwardResult NetworkModel::infer(const Tensor& x, NetworkCache* cache) const {
    return run(x, Mode::Infer, cache);
}

Tensor NetworkModel::backprop(const Tensor& seed, size_t from_layer, const NetworkCache& cache,
                              Eigen::VectorXd* grads) const {
    if (cache.layers.size() != layers_.size())
        throw ShapeError("network cache does not match this network");
    if (grads && grads->size() != params_.size())
        throw ShapeError("gradient buffer size mismatch");
    Tensor d = seed;
    for (size_t i = from_layer + 1; i-- > 0;) {
        if (!cache.layers[i]) throw ShapeError("backward without a cached forward pass");
        std::span<double> gw;
        if (grads && w_count_[i] > 0)
            gw = std::span<double>(grads->data() + w_offset_[i], static_cast<size_t>(w_count_[i]));
        std::span<const double> w(params_.data() + w_offset_[i], static_cast<size_t>(w_count_[i]));
        d = layers_[i]->backward(w, *cache.layers[i], d, gw);
    }
    return d;
}

Tensor NetworkModel::backward(const Tensor& d_output, const NetworkCache& cache,
                              Eigen::VectorXd* grads) const {
    return backprop(d_output, layers_.size() - 1, cache, grads);
}

Tensor NetworkModel::backward_from_logits(const Tensor& d_logits, const NetworkCache& cache,
                                          Eigen::VectorXd* grads) const {
    if (!has_prob_head())
        throw ShapeError("backward_from_logits requires a probability head");
    return backprop(d_logits, layers_.size() - 2, cache, grads);
}

json NetworkModel::architecture() const {
    json layers = json::array();
    for (const auto& l : layers_) layers.push_back(l->spec());
    return {{"input", {{"channels", input_.channels}, {"length", input_.length}}},
            {"layers", layers}};
}

NetworkModel build_generator(int length, uint64_t param_seed) {
    if (length < 4 || length % 4 != 0)
        throw ShapeError("generator length must be a positive multiple of 4, got " +
                         std::to_string(length));
    std::vector<LayerPtr> layers;
    Shape cur{1, length};
    auto add = [&](LayerPtr l) {
        cur = l->out_shape();
        layers.push_back(std::move(l));
    };
    auto conv_block = [&](int filters, int stride) {
        add(make_conv1d(cur, filters, 3, stride));
        add(make_batch_norm(cur, 0.8));
        add(make_elu(cur, 2.0));
    };
    conv_block(8, 1);
    conv_block(16, 2);
    conv_block(32, 2);
    for (int i = 0; i < 8; ++i) conv_block(32, 1);
    add(make_transposed_conv1d(cur, 16, 3, 2));
    add(make_batch_norm(cur, 0.8));
    add(make_elu(cur, 2.0));
    add(make_transposed_conv1d(cur, 8, 3, 2));
    add(make_batch_norm(cur, 0.8));
    add(make_elu(cur, 2.0));
    add(make_conv1d(cur, 1, 3, 1));
    add(make_relu(cur));

    NetworkModel net({1, length}, std::move(layers), param_seed);
    if (!(net.output_shape() == Shape{1, length}))
        throw ShapeError("generator output shape mismatch");
    return net;
}

NetworkModel build_discriminator(int length, int num_outputs, uint64_t param_seed) {
    if (num_outputs < 1) throw ShapeError("discriminator needs num_outputs >= 1");
    std::vector<LayerPtr> layers;
    Shape cur{1, length};
    auto add = [&](LayerPtr l) {
        cur = l->out_shape();
        layers.push_back(std::move(l));
    };
    for (int i = 0; i < 2; ++i) {
        add(make_conv1d(cur, 32, 8, 1));
        add(make_elu(cur, 1.0));
    }
    add(make_max_pool1d(cur, 8, 4));
    for (int i = 0; i < 2; ++i) {
        add(make_conv1d(cur, 64, 8, 1));
        add(make_elu(cur, 1.0));
    }
    add(make_max_pool1d(cur, 8, 4));
    for (int i = 0; i < 2; ++i) {
        add(make_dense(cur, 512));
        add(make_relu(cur));
    }
    add(make_dense(cur, num_outputs));
    // A 1-unit head reads out a single transformer-label probability, so the
    // coherent activation is logistic rather than a degenerate softmax.
    if (num_outputs == 1)
        add(make_sigmoid(cur));
    else
        add(make_softmax(cur));
    return NetworkModel({1, length}, std::move(layers), param_seed);
}

NetworkModel network_from_architecture(const json& arch) {
    Shape input{arch.at("input").at("channels").get<int>(),
                arch.at("input").at("length").get<int>()};
    std::vector<LayerPtr> layers;
    Shape cur = input;
    for (const auto& spec : arch.at("layers")) {
        layers.push_back(layer_from_spec(spec, cur));
        cur = layers.back()->out_shape();
    }
    return NetworkModel(input, std::move(layers), 0);
}

} // namespace awa
