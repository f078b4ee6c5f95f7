#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "awa/layers.hpp"

namespace awa {

/// Per-layer activation records from one forward pass. Must be paired with
/// the network instance that produced it.
struct NetworkCache {
    std::vector<CachePtr> layers;
};

/// Network output plus the pre-head logits when the final layer is a
/// probability head (softmax/sigmoid); otherwise logits == output.
struct ForwardResult {
    Tensor output;
    Tensor logits;
};

/// A feed-forward stack of layers with one flat parameter vector and one flat
/// batch-norm state vector. Training-mode forward mutates running statistics
/// (single writer); inference on a frozen model is const and thread-safe.
class NetworkModel {
public:
    NetworkModel(Shape input, std::vector<LayerPtr> layers, uint64_t param_seed);

    /// Training-mode forward: batch statistics, running stats updated.
    ForwardResult forward(const Tensor& x, NetworkCache* cache = nullptr);

    /// Inference-mode forward: running statistics, no mutation.
    ForwardResult infer(const Tensor& x, NetworkCache* cache = nullptr) const;

    /// Backpropagates from the network output. Accumulates parameter
    /// gradients into `grads` (sized like params()) when non-null; returns
    /// the gradient w.r.t. the input batch.
    Tensor backward(const Tensor& d_output, const NetworkCache& cache,
                    Eigen::VectorXd* grads) const;

    /// Backpropagates from the logits, skipping the probability head.
    Tensor backward_from_logits(const Tensor& d_logits, const NetworkCache& cache,
                                Eigen::VectorXd* grads) const;

    const Eigen::VectorXd& params() const { return params_; }
    Eigen::VectorXd& params() { return params_; }
    const Eigen::VectorXd& bn_state() const { return state_; }
    Eigen::VectorXd& bn_state() { return state_; }

    Shape input_shape() const { return input_; }
    Shape output_shape() const;
    bool has_prob_head() const;
    size_t layer_count() const { return layers_.size(); }

    /// Architecture manifest: input shape plus the layer spec list.
    nlohmann::json architecture() const;

private:
    ForwardResult run(const Tensor& x, Mode mode, NetworkCache* cache) const;
    Tensor backprop(const Tensor& seed, size_t from_layer, const NetworkCache& cache,
                    Eigen::VectorXd* grads) const;

    Shape input_;
    std::vector<LayerPtr> layers_;
    std::vector<Shape> in_shapes_;
    std::vector<int> w_offset_, w_count_;
    std::vector<int> s_offset_, s_count_;
    Eigen::VectorXd params_;
    Eigen::VectorXd state_;
};

/// Perturbation generator. Requires the trace length to be divisible by 4
/// (two stride-2 downsamplings followed by two stride-2 upsamplings); output
/// is a length-L single-channel vector with all entries >= 0.
NetworkModel build_generator(int length, uint64_t param_seed);

/// Classifier stack shared by the pair discriminator (num_outputs = 1,
/// logistic output in (0,1)) and the auxiliary classifier (num_outputs = K,
/// softmax output). Exposes pre-head logits through ForwardResult.
NetworkModel build_discriminator(int length, int num_outputs, uint64_t param_seed);

/// Rebuilds a network from an architecture manifest (parameters initialized
/// to zero; callers overwrite them from serialized data).
NetworkModel network_from_architecture(const nlohmann::json& arch);

} // namespace awa
