#pragma once

#include <optional>
#include <string>
#include <vector>

#include "awa/network.hpp"
#include "awa/trace.hpp"

namespace awa {

enum class TransformMode { Universal, NonUniversal };
enum class Phase { Train, Test };

std::string to_string(TransformMode mode);
TransformMode transform_mode_from_string(const std::string& s);

/// A trained per-website transformer: a generator plus the application rule.
struct TransformerSpec {
    int website_id = 0;
    TransformMode mode = TransformMode::Universal;
    NetworkModel generator;
    /// Universal test-phase cache: the rounded perturbation vector. Never set
    /// in non-universal mode.
    std::optional<Eigen::VectorXd> cached_perturbation;
    uint64_t noise_seed = 0;

    /// Raw generator output for one input. Non-universal mode requires a
    /// trace; universal mode requires a noise vector unless the cache is
    /// populated. All entries are >= 0.
    Eigen::VectorXd perturbation_vector(const FixedTrace* trace,
                                        const Eigen::VectorXd* noise) const;

    /// The fixed noise vector drawn from noise_seed (universal mode).
    Eigen::VectorXd canonical_noise() const;

    /// Transforms one trace. Test phase rounds output magnitudes to the
    /// nearest integer (ties away from zero); train phase keeps them real.
    FixedTrace apply(const FixedTrace& trace, Phase phase) const;
};

/// One transformer per website plus the training provenance.
struct TransformerSet {
    int num_classes = 0;
    int trace_length = 0;
    TransformMode mode = TransformMode::Universal;
    std::vector<TransformerSpec> transformers; // indexed by website id
    std::vector<std::pair<int, int>> pair_list;
    uint64_t seed_fingerprint = 0;

    const TransformerSpec& for_website(int website_id) const;
};

struct ConstraintViolation {
    int constraint = 0; // 1: packet removed, 2: non-integer, 3: burst structure
    int index = 0;
    std::string detail;
};

struct ConstraintReport {
    std::vector<ConstraintViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Verifies the three traffic constraints between an original trace and its
/// transformed version: no packet removed, integer magnitudes, and an intact
/// burst structure (dummy packets only extend existing bursts).
ConstraintReport check_constraints(const FixedTrace& original, const FixedTrace& transformed);

/// Burst-aligned perturbation of a whole batch (rows are traces). The
/// perturbation row is shifted one slot right for traces starting with a
/// negative burst; sign(0) = 0 annihilates perturbation on padding.
Eigen::MatrixXd apply_perturbation_batch(const Eigen::MatrixXd& perturbation,
                                         const Eigen::MatrixXd& traces);

/// Adjoint of apply_perturbation_batch: maps gradients w.r.t. transformed
/// traces back to gradients w.r.t. the perturbation rows.
Eigen::MatrixXd apply_perturbation_backward(const Eigen::MatrixXd& d_transformed,
                                            const Eigen::MatrixXd& traces);

/// Rounds half away from zero.
double round_magnitude(double v);

} // namespace awa
