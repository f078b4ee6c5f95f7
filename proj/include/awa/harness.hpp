#pragma once

#include <functional>
#include <string>
#include <vector>

#include "awa/metrics.hpp"
#include "awa/trainer.hpp"

namespace awa {

/// Adversary classifier training configuration. The classifier is pluggable
/// through the registry; "standin" is the built-in discriminator-with-K-
/// outputs architecture.
struct ScenarioConfig {
    std::string classifier = "standin";
    int epochs = 30;
    int batch_size = 128;
    double learning_rate = 2e-4;
    uint64_t seed = 1;

    void validate() const;
};

using ClassifierFactory = std::function<NetworkModel(int length, int num_classes,
                                                     uint64_t seed)>;

void register_classifier(const std::string& name, ClassifierFactory factory);
ClassifierFactory classifier_factory(const std::string& name);

/// Target-user traces with labels sealed away from the adversary path: only
/// score() can reach them, so a classifier can be evaluated but never
/// trained or selected on user labels.
class SealedCorpus {
public:
    explicit SealedCorpus(TraceCorpus corpus);

    const std::vector<FixedTrace>& traces() const { return corpus_.traces; }
    int num_classes() const { return corpus_.num_classes; }

    /// Accuracy (%) of a classifier on the sealed traces.
    double score(const NetworkModel& model) const;

    /// Sealed corpus transformed by one transformer set (test phase).
    SealedCorpus transformed_by(const TransformerSet& set) const;

    /// Mean per-class BWO (%) this set would impose on the sealed traces.
    /// Like score(), a report-only computation; labels stay private.
    double mean_bwo(const TransformerSet& set) const;

private:
    TraceCorpus corpus_;
};

/// Scenario-1 accuracy matrix plus the scenario-2 combination column.
/// accuracy(j, i) is the adversary's accuracy when the adversary trains on
/// transformer set i and the target user generates traces through set j.
struct ExperimentReport {
    int num_sets = 0;
    TransformMode mode = TransformMode::Universal;
    Eigen::MatrixXd accuracy;            // user set x adversary set
    std::vector<double> adversary_bwo;   // per set, on the adversary corpus, %
    std::vector<double> user_bwo;        // per set, on the user corpus, %
    std::vector<double> combination;     // scenario 2: per user set, %
    IntraCDReport intra_cd;
    /// Deterministic provenance: tool version, manifest hash, config echo.
    std::string tool_version;
    std::string manifest_hash;

    double mean_diagonal() const;
    double mean_off_diagonal() const;
};

/// Transforms every trace through its class's transformer, test phase;
/// labels preserved. Throws CoverageError if a class lacks a transformer.
TraceCorpus generate_adversarial_corpus(const TransformerSet& set, const TraceCorpus& corpus);

/// Trains the adversary classifier on `train`, selecting the epoch with the
/// best validation accuracy on `val`.
NetworkModel train_adversary_classifier(const TraceCorpus& train, const TraceCorpus& val,
                                        const ScenarioConfig& config, uint64_t seed);

/// Scenario 1: every (adversary set, user set) cell of the accuracy matrix,
/// with per-set BWO annotations. Rows train independently and run in
/// parallel when jobs > 1, with identical results.
ExperimentReport run_scenario1(const std::vector<const TransformerSet*>& sets,
                               const TraceCorpus& adversary_train,
                               const TraceCorpus& adversary_val, const SealedCorpus& user,
                               const ScenarioConfig& config, int jobs = 1);

/// Scenario 2: for each user set j, one classifier trained on the union of
/// all adversary corpora transformed by every set except j.
std::vector<double> run_scenario2(const std::vector<const TransformerSet*>& sets,
                                  const TraceCorpus& adversary_train,
                                  const TraceCorpus& adversary_val, const SealedCorpus& user,
                                  const ScenarioConfig& config, int jobs = 1);

/// Side-by-side accuracy/BWO deltas between two matched-mode reports, with
/// the published full-scale reference row embedded as a static annotation.
struct ModeComparison {
    std::vector<std::string> rows;
};

ModeComparison compare_modes(const ExperimentReport& universal,
                             const ExperimentReport& non_universal);

} // namespace awa
