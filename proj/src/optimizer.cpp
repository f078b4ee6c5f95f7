#include "awa/optimizer.hpp"

#include <cmath>

namespace awa {

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    if (lr_ <= 0.0) throw ConfigError("learning rate must be positive");
}

void AdamOptimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    if (params.size() != grads.size())
        throw ShapeError("optimizer: parameter/gradient size mismatch");
    if (m_.size() != params.size()) {
        m_ = Eigen::VectorXd::Zero(params.size());
        v_ = Eigen::VectorXd::Zero(params.size());
    }
    ++steps_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grads;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grads.cwiseProduct(grads);
    double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    params -= (lr_ / c1) * m_.cwiseQuotient(((v_ / c2).cwiseSqrt().array() + eps_).matrix());
}

double grad_step(NetworkModel& model, AdamOptimizer& opt, const LossFn& loss_fn,
                 const Tensor& batch) {
    NetworkCache cache;
    ForwardResult res = model.forward(batch, &cache);
    LossGrad lg = loss_fn(res);
    if (!std::isfinite(lg.value))
        throw NumericalError("non-finite loss in grad_step at optimizer step " +
                             std::to_string(opt.step_count() + 1));
    Eigen::VectorXd grads = Eigen::VectorXd::Zero(model.params().size());
    if (lg.from_logits)
        model.backward_from_logits(lg.d_seed, cache, &grads);
    else
        model.backward(lg.d_seed, cache, &grads);
    opt.step(model.params(), grads);
    return lg.value;
}

} // namespace awa
