#pragma once

#include <memory>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "awa/rng.hpp"
#include "awa/tensor.hpp"

namespace awa {

enum class Mode { Train, Infer };

/// Opaque per-layer activation record produced by forward and consumed by
/// backward. Owned by the caller so frozen models can serve many threads.
struct LayerCache {
    virtual ~LayerCache() = default;
};

using CachePtr = std::unique_ptr<LayerCache>;

/// One differentiable layer. Layers hold hyperparameters only; parameters and
/// batch-norm running statistics live in flat buffers owned by the network
/// and are passed in as spans. All methods are const and thread-safe except
/// that Train-mode forward writes running statistics through `state`.
class Layer {
public:
    virtual ~Layer() = default;

    virtual std::string kind() const = 0;
    virtual Shape out_shape() const = 0;
    virtual int param_count() const { return 0; }
    virtual int state_count() const { return 0; }

    virtual void init_params(std::span<double> w, Rng& rng) const { (void)w; (void)rng; }
    virtual void init_state(std::span<double> s) const { (void)s; }

    /// `state` is written only in Train mode (batch-norm running stats).
    virtual Tensor forward(std::span<const double> w, std::span<double> state,
                           const Tensor& x, Mode mode, CachePtr* cache) const = 0;

    /// Returns the gradient w.r.t. the layer input; accumulates parameter
    /// gradients into `gw` when nonempty.
    virtual Tensor backward(std::span<const double> w, const LayerCache& cache,
                            const Tensor& dy, std::span<double> gw) const = 0;

    /// Hyperparameters as structured text for the model container.
    virtual nlohmann::json spec() const = 0;

    /// True for the probability heads (softmax, sigmoid) whose input is the
    /// network's logits.
    virtual bool is_prob_head() const { return false; }
};

using LayerPtr = std::unique_ptr<Layer>;

// Factories. Convolutional layers use "same" padding throughout: output
// length ceil(in/stride) for conv1d and max_pool1d, in*stride for
// transposed_conv1d.
LayerPtr make_conv1d(Shape in, int filters, int kernel_size, int stride);
LayerPtr make_transposed_conv1d(Shape in, int filters, int kernel_size, int stride);
LayerPtr make_batch_norm(Shape in, double momentum);
LayerPtr make_elu(Shape in, double alpha);
LayerPtr make_relu(Shape in);
LayerPtr make_max_pool1d(Shape in, int pool_size, int stride);
LayerPtr make_dense(Shape in, int units);
LayerPtr make_softmax(Shape in);
LayerPtr make_sigmoid(Shape in);

/// Reconstructs a layer from its spec() JSON given its input shape.
LayerPtr layer_from_spec(const nlohmann::json& spec, Shape in);

} // namespace awa
