#include "awa/transformer.hpp"

#include <cmath>

namespace awa {

std::string to_string(TransformMode mode) {
    return mode == TransformMode::Universal ? "universal" : "non-universal";
}

TransformMode transform_mode_from_string(const std::string& s) {
    if (s == "universal") return TransformMode::Universal;
    if (s == "non-universal" || s == "non_universal") return TransformMode::NonUniversal;
    throw ConfigError("unknown transform mode '" + s + "'");
}

double round_magnitude(double v) { return std::round(std::abs(v)) * (v < 0.0 ? -1.0 : 1.0); }

Eigen::VectorXd TransformerSpec::canonical_noise() const {
    Rng rng(noise_seed);
    Eigen::VectorXd z(generator.input_shape().length);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    return z;
}

Eigen::VectorXd TransformerSpec::perturbation_vector(const FixedTrace* trace,
                                                     const Eigen::VectorXd* noise) const {
    const int L = generator.input_shape().length;
    if (mode == TransformMode::NonUniversal) {
        if (!trace) throw ModeError("non-universal transformer requires a trace");
        if (trace->length() != L) throw ShapeError("trace length does not match generator");
        Tensor in = Tensor::zeros(1, {1, L});
        for (int i = 0; i < L; ++i) in.m(0, i) = trace->values[static_cast<size_t>(i)];
        return generator.infer(in).output.m.row(0).transpose();
    }
    if (cached_perturbation) return *cached_perturbation;
    if (!noise) throw ModeError("universal transformer requires noise or a cached perturbation");
    if (noise->size() != L) throw ShapeError("noise length does not match generator");
    Tensor in = Tensor::zeros(1, {1, L});
    for (int i = 0; i < L; ++i) in.m(0, i) = (*noise)(i);
    return generator.infer(in).output.m.row(0).transpose();
}

Eigen::MatrixXd apply_perturbation_batch(const Eigen::MatrixXd& perturbation,
                                         const Eigen::MatrixXd& traces) {
    if (perturbation.rows() != traces.rows() || perturbation.cols() != traces.cols())
        throw ShapeError("perturbation/trace shape mismatch");
    const Eigen::Index B = traces.rows(), L = traces.cols();
    Eigen::MatrixXd out = traces;
    for (Eigen::Index b = 0; b < B; ++b) {
        // The first perturbation element belongs to the first positive burst:
        // shift right by one when the trace opens with a negative burst.
        bool shifted = L > 0 && traces(b, 0) < 0.0;
        for (Eigen::Index j = 0; j < L; ++j) {
            double x = traces(b, j);
            if (x == 0.0) continue;
            Eigen::Index src = shifted ? j - 1 : j;
            if (src < 0) continue;
            double p = perturbation(b, src);
            out(b, j) = x > 0.0 ? x + p : x - p;
        }
    }
    return out;
}

Eigen::MatrixXd apply_perturbation_backward(const Eigen::MatrixXd& d_transformed,
                                            const Eigen::MatrixXd& traces) {
    if (d_transformed.rows() != traces.rows() || d_transformed.cols() != traces.cols())
        throw ShapeError("gradient/trace shape mismatch");
    const Eigen::Index B = traces.rows(), L = traces.cols();
    Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(B, L);
    for (Eigen::Index b = 0; b < B; ++b) {
        bool shifted = L > 0 && traces(b, 0) < 0.0;
        for (Eigen::Index j = 0; j < L; ++j) {
            double x = traces(b, j);
            if (x == 0.0) continue;
            Eigen::Index src = shifted ? j - 1 : j;
            if (src < 0) continue;
            dp(b, src) += x > 0.0 ? d_transformed(b, j) : -d_transformed(b, j);
        }
    }
    return dp;
}

FixedTrace TransformerSpec::apply(const FixedTrace& trace, Phase phase) const {
    const int L = generator.input_shape().length;
    if (trace.length() != L) throw InvalidTrace("trace length does not match transformer");

    Eigen::VectorXd p;
    if (mode == TransformMode::NonUniversal) {
        p = perturbation_vector(&trace, nullptr);
    } else if (phase == Phase::Test && cached_perturbation) {
        p = *cached_perturbation;
    } else {
        // Train phase wants the raw generator output; the cache holds the
        // rounded test-phase vector.
        Eigen::VectorXd z = canonical_noise();
        Tensor in = Tensor::zeros(1, {1, L});
        for (int i = 0; i < L; ++i) in.m(0, i) = z(i);
        p = generator.infer(in).output.m.row(0).transpose();
    }

    Eigen::MatrixXd x(1, L), pm(1, L);
    for (int i = 0; i < L; ++i) {
        x(0, i) = trace.values[static_cast<size_t>(i)];
        pm(0, i) = p(i);
    }
    Eigen::MatrixXd t = apply_perturbation_batch(pm, x);

    FixedTrace out;
    out.original_burst_count = trace.original_burst_count;
    out.values.resize(static_cast<size_t>(L));
    for (int i = 0; i < L; ++i) {
        double v = t(0, i);
        out.values[static_cast<size_t>(i)] = phase == Phase::Test ? round_magnitude(v) : v;
    }
    return out;
}

const TransformerSpec& TransformerSet::for_website(int website_id) const {
    if (website_id < 0 || website_id >= static_cast<int>(transformers.size()))
        throw CoverageError("no transformer for website " + std::to_string(website_id));
    return transformers[static_cast<size_t>(website_id)];
}

ConstraintReport check_constraints(const FixedTrace& original, const FixedTrace& transformed) {
    ConstraintReport report;
    if (original.length() != transformed.length())
        throw InvalidTrace("check_constraints: length mismatch");

    for (int i = 0; i < original.length(); ++i) {
        double o = original.values[static_cast<size_t>(i)];
        double t = transformed.values[static_cast<size_t>(i)];
        if (i >= original.original_burst_count || o == 0.0) {
            if (t != 0.0)
                report.violations.push_back(
                    {3, i, "burst created on padding position " + std::to_string(i)});
            continue;
        }
        if ((o > 0.0) != (t > 0.0) || t == 0.0) {
            report.violations.push_back(
                {3, i, "burst direction changed at position " + std::to_string(i)});
            continue;
        }
        if (std::abs(t) < std::abs(o))
            report.violations.push_back(
                {1, i, "packets removed at position " + std::to_string(i)});
        if (std::abs(t - std::nearbyint(t)) > 1e-9)
            report.violations.push_back(
                {2, i, "non-integer burst size at position " + std::to_string(i)});
    }
    return report;
}

} // namespace awa
