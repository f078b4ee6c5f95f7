#pragma once

#include <functional>

#include "awa/network.hpp"

namespace awa {

/// Adam with bias correction. Moment buffers are lazily sized on first step.
class AdamOptimizer {
public:
    explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                           double epsilon = 1e-8);

    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);

    int64_t step_count() const { return steps_; }
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    int64_t steps_ = 0;
    Eigen::VectorXd m_, v_;
};

/// Loss evaluated on a forward result: value plus the gradient seed, either
/// at the network output or at the logits.
struct LossGrad {
    double value = 0.0;
    Tensor d_seed;
    bool from_logits = false;
};

using LossFn = std::function<LossGrad(const ForwardResult&)>;

/// One training-mode forward/backward/update step. Throws NumericalError if
/// the loss is non-finite. Returns the loss value.
double grad_step(NetworkModel& model, AdamOptimizer& opt, const LossFn& loss_fn,
                 const Tensor& batch);

} // namespace awa
