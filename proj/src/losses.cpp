#include "awa/losses.hpp"

#include <cmath>
#include <string>

namespace awa {

namespace {

constexpr double kProbFloor = 1e-7;

void check_labels(Eigen::Index batch, Eigen::Index width, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != batch)
        throw ShapeError("label count does not match batch size");
    for (int y : labels)
        if (y < 0 || y >= width)
            throw ShapeError("label " + std::to_string(y) + " outside [0," +
                             std::to_string(width) + ")");
}

void check_unit_interval(const Eigen::VectorXd& d, const char* name) {
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d(i) > 0.0 && d(i) < 1.0))
            throw DomainError(std::string(name) + " value " + std::to_string(d(i)) +
                              " outside (0,1)");
}

} // namespace

void LossWeights::validate() const {
    if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0) ||
        !std::isfinite(alpha + beta + gamma))
        throw ConfigError("loss weights must be finite and nonnegative");
    if (!(tau_low >= 0.0 && tau_low < tau_high))
        throw ConfigError("requires 0 <= tau_low < tau_high");
}

MatrixLoss loss_auxiliary(const Eigen::MatrixXd& probabilities, const std::vector<int>& labels) {
    const Eigen::Index B = probabilities.rows();
    if (B == 0) throw EmptyInput("loss_auxiliary: empty batch");
    check_labels(B, probabilities.cols(), labels);

    MatrixLoss out;
    out.grad = Eigen::MatrixXd::Zero(B, probabilities.cols());
    for (Eigen::Index i = 0; i < B; ++i) {
        double p = std::max(probabilities(i, labels[static_cast<size_t>(i)]), kProbFloor);
        out.value -= std::log(p);
        out.grad(i, labels[static_cast<size_t>(i)]) = -1.0 / (p * static_cast<double>(B));
    }
    out.value /= static_cast<double>(B);
    return out;
}

PairDiscriminatorLoss loss_discriminator(const Eigen::VectorXd& d_on_a,
                                         const Eigen::VectorXd& d_on_b) {
    if (d_on_a.size() == 0 || d_on_b.size() == 0)
        throw EmptyInput("loss_discriminator: empty batch");
    check_unit_interval(d_on_a, "discriminator output (A)");
    check_unit_interval(d_on_b, "discriminator output (B)");

    PairDiscriminatorLoss out;
    out.grad_a = Eigen::VectorXd::Zero(d_on_a.size());
    out.grad_b = Eigen::VectorXd::Zero(d_on_b.size());
    const double na = static_cast<double>(d_on_a.size());
    const double nb = static_cast<double>(d_on_b.size());
    for (Eigen::Index i = 0; i < d_on_a.size(); ++i) {
        double d = std::max(d_on_a(i), kProbFloor);
        out.value -= std::log(d) / na;
        out.grad_a(i) = -1.0 / (d * na);
    }
    for (Eigen::Index i = 0; i < d_on_b.size(); ++i) {
        double d = std::max(1.0 - d_on_b(i), kProbFloor);
        out.value -= std::log(d) / nb;
        out.grad_b(i) = 1.0 / (d * nb);
    }
    return out;
}

MatrixLoss loss_gen_ac(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
    const Eigen::Index B = logits.rows();
    if (B == 0) throw EmptyInput("loss_gen_ac: empty batch");
    check_labels(B, logits.cols(), labels);

    MatrixLoss out;
    out.grad = Eigen::MatrixXd::Zero(B, logits.cols());
    for (Eigen::Index i = 0; i < B; ++i) {
        double z = logits(i, labels[static_cast<size_t>(i)]);
        if (z > 0.0) {
            out.value += z;
            out.grad(i, labels[static_cast<size_t>(i)]) = 1.0 / static_cast<double>(B);
        }
    }
    out.value /= static_cast<double>(B);
    return out;
}

MatrixLoss loss_gen_oh(const Eigen::MatrixXd& original, const Eigen::MatrixXd& transformed,
                       double tau_low, double tau_high) {
    if (original.rows() != transformed.rows() || original.cols() != transformed.cols())
        throw ShapeError("loss_gen_oh: shape mismatch");
    const Eigen::Index B = original.rows();
    if (B == 0) throw EmptyInput("loss_gen_oh: empty batch");

    MatrixLoss out;
    out.grad = Eigen::MatrixXd::Zero(B, original.cols());
    for (Eigen::Index i = 0; i < B; ++i) {
        double base = original.row(i).cwiseAbs().sum();
        if (base == 0.0)
            throw DegenerateTrace("loss_gen_oh: trace " + std::to_string(i) +
                                  " has zero volume");
        double added = (transformed.row(i).cwiseAbs() - original.row(i).cwiseAbs()).sum();
        double r = added / base;
        double dpen = 0.0;
        if (r > tau_high) {
            out.value += r - tau_high;
            dpen = 1.0;
        } else if (r < tau_low) {
            out.value += tau_low - r;
            dpen = -1.0;
        }
        if (dpen != 0.0) {
            double scale = dpen / (base * static_cast<double>(B));
            for (Eigen::Index j = 0; j < original.cols(); ++j) {
                double t = transformed(i, j);
                if (t > 0.0)
                    out.grad(i, j) = scale;
                else if (t < 0.0)
                    out.grad(i, j) = -scale;
            }
        }
    }
    out.value /= static_cast<double>(B);
    return out;
}

VectorLoss loss_gen_dc(const Eigen::VectorXd& d_on_transformed) {
    if (d_on_transformed.size() == 0) throw EmptyInput("loss_gen_dc: empty batch");
    check_unit_interval(d_on_transformed, "discriminator output");

    VectorLoss out;
    out.grad = Eigen::VectorXd::Zero(d_on_transformed.size());
    const double n = static_cast<double>(d_on_transformed.size());
    for (Eigen::Index i = 0; i < d_on_transformed.size(); ++i) {
        double d = std::min(std::max(d_on_transformed(i), kProbFloor), 1.0 - kProbFloor);
        out.value -= 0.5 * (std::log(d) + std::log(1.0 - d)) / n;
        out.grad(i) = -0.5 * (1.0 / d - 1.0 / (1.0 - d)) / n;
    }
    return out;
}

double loss_generator_total(double ac_part, double oh_part, double dc_part,
                            const LossWeights& weights) {
    return weights.alpha * ac_part + weights.beta * oh_part + weights.gamma * dc_part;
}

} // namespace awa
