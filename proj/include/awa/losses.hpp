#pragma once

#include <Eigen/Dense>
#include <vector>

#include "awa/errors.hpp"

namespace awa {

/// Weights of the three generator loss terms and the no-penalty overhead band.
struct LossWeights {
    double alpha = 1e3;
    double beta = 1e3;
    double gamma = 1e2;
    double tau_low = 0.05;
    double tau_high = 0.30;

    void validate() const;
};

/// Scalar loss with gradient w.r.t. a matrix input.
struct MatrixLoss {
    double value = 0.0;
    Eigen::MatrixXd grad;
};

/// Scalar loss with gradient w.r.t. a vector input.
struct VectorLoss {
    double value = 0.0;
    Eigen::VectorXd grad;
};

struct PairDiscriminatorLoss {
    double value = 0.0;
    Eigen::VectorXd grad_a;
    Eigen::VectorXd grad_b;
};

/// Cross-entropy of the auxiliary classifier: mean over the batch of
/// -log p[true class]. Probabilities are floored at 1e-7 inside the log.
MatrixLoss loss_auxiliary(const Eigen::MatrixXd& probabilities, const std::vector<int>& labels);

/// Pair-discriminator loss: -mean log d_A - mean log(1 - d_B), where the
/// A side carries transformer label 1. Inputs must lie in (0, 1).
PairDiscriminatorLoss loss_discriminator(const Eigen::VectorXd& d_on_a,
                                         const Eigen::VectorXd& d_on_b);

/// Hinged true-class logit of the auxiliary classifier on transformed
/// traces: mean over the batch of max(logit[true class], 0).
MatrixLoss loss_gen_ac(const Eigen::MatrixXd& logits, const std::vector<int>& labels);

/// Overhead band penalty. With per-trace overhead ratio r, the penalty is
/// max(r - tau_high, 0) - min(r - tau_low, 0), averaged over the batch;
/// exactly zero when every r lies in [tau_low, tau_high]. The gradient is
/// w.r.t. the transformed batch.
MatrixLoss loss_gen_oh(const Eigen::MatrixXd& original, const Eigen::MatrixXd& transformed,
                       double tau_low, double tau_high);

/// Domain-confusion loss: -mean[1/2 log d + 1/2 log(1-d)], minimized (ln 2)
/// when the discriminator outputs 0.5.
VectorLoss loss_gen_dc(const Eigen::VectorXd& d_on_transformed);

/// Weighted sum alpha * ac + beta * oh + gamma * dc.
double loss_generator_total(double ac_part, double oh_part, double dc_part,
                            const LossWeights& weights);

} // namespace awa
