#pragma once

#include <string>
#include <vector>

#include "awa/transformer.hpp"

namespace awa {

/// Gaussian-kernel configuration. bandwidth <= 0 selects the median
/// heuristic: the median pairwise distance over the two sets combined.
struct KernelConfig {
    double bandwidth = 0.0;

    bool median_heuristic() const { return bandwidth <= 0.0; }
};

/// Empirical MMD between two sample sets (one sample per row), using the
/// biased V-statistic with a Gaussian kernel, floored at zero before the
/// square root.
double mmd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const KernelConfig& kernel);

/// Per-class pairwise MMD across transformer sets.
struct IntraCDReport {
    int num_classes = 0;
    int num_sets = 0;
    /// distance[k] is the symmetric S x S matrix of class k.
    std::vector<Eigen::MatrixXd> distance;
    double avg_intra_cd = 0.0;
    double min_intra_cd = 0.0;
    /// Estimator provenance carried into every emitted report.
    std::string estimator = "biased V-statistic, gaussian kernel";
};

/// Distances between the test-phase transformed distributions of each class
/// across S >= 2 transformer sets; avg/min are means over classes of the
/// per-class pair average and pair minimum.
IntraCDReport intra_cd(const std::vector<const TransformerSet*>& sets,
                       const TraceCorpus& corpus, const KernelConfig& kernel);

/// Top-1 accuracy percentage; argmax ties resolve to the lowest class index.
double classifier_accuracy(const NetworkModel& model, const TraceCorpus& corpus);

/// Mean per-trace bandwidth overhead percentage of each class under
/// test-phase application.
std::vector<double> per_class_bwo(const TransformerSet& set, const TraceCorpus& corpus);

} // namespace awa
