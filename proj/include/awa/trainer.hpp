#pragma once

#include <functional>
#include <vector>

#include "awa/losses.hpp"
#include "awa/optimizer.hpp"
#include "awa/transformer.hpp"

namespace awa {

/// Hyperparameters of one adversarial training run.
struct TrainConfig {
    int iterations = 1000;   // outer iterations T
    int disc_steps = 2;      // discriminator iterations D_T per phase
    int gen_steps = 2;       // generator iterations G_T per phase
    int batch_size = 100;    // bs
    double overhead_gate = 0.5; // OH, as a fraction
    LossWeights weights;

    double gen_lr = 1e-4;
    double disc_lr = 1e-4;
    double ac_lr = 2e-4;
    int ac_epochs = 30;
    int ac_batch = 128;

    void validate() const;
};

using PairList = std::vector<std::pair<int, int>>;

/// Per-iteration record emitted through the progress sink and kept in the
/// training log. Overheads are fractions, comparable to the OH gate.
struct IterationStats {
    int pair_index = 0;
    int website_a = 0;
    int website_b = 0;
    int iteration = 0;
    double disc_loss = 0.0;
    double gen_a_loss = 0.0;
    double gen_b_loss = 0.0;
    double bwo_a = 0.0;
    double bwo_b = 0.0;
    bool gate_satisfied = false;
};

using ProgressSink = std::function<void(const IterationStats&)>;

struct PairOutcome {
    int pair_index = 0;
    int website_a = 0;
    int website_b = 0;
    int selected_iteration = -1;
    bool used_fallback = false;
    std::vector<IterationStats> iterations;
};

struct TrainingLog {
    uint64_t seed_fingerprint = 0;
    std::vector<PairOutcome> pairs;
};

struct TrainedSet {
    TransformerSet set;
    TrainingLog log;
};

/// Transformer selection under the overhead gate: keeps the most recent
/// iteration where both overheads are <= the gate, falling back to the final
/// iteration when no iteration ever satisfied it.
class GateSelector {
public:
    struct Snapshot {
        Eigen::VectorXd params_a, state_a;
        Eigen::VectorXd params_b, state_b;
    };

    GateSelector(double overhead_gate, int total_iterations);

    /// Feed one iteration's overheads (fractions) and parameter snapshot.
    /// Returns true when this iteration satisfied the gate.
    bool observe(int iteration, double bwo_a, double bwo_b, Snapshot snapshot);

    bool has_selection() const { return selected_iteration_ >= 0; }
    bool used_fallback() const { return used_fallback_; }
    int selected_iteration() const;
    const Snapshot& selection() const;

private:
    double gate_;
    int total_;
    int selected_iteration_ = -1;
    bool used_fallback_ = false;
    Snapshot snapshot_;
};

/// Trains the auxiliary classifier on the full corpus with cross-entropy and
/// returns it frozen. Throws TrainError when fewer than two classes are
/// populated.
NetworkModel pretrain_auxiliary(const TraceCorpus& corpus, const TrainConfig& config,
                                uint64_t seed);

/// Uniform random perfect matching over an even number of websites; each
/// pair is stored (low id, high id). Deterministic per seed.
PairList select_pairs(int num_classes, uint64_t pair_seed);

/// Seeds for one pair plus the fixed per-website test-phase noise.
struct PairTrainSeeds {
    PairSeeds pair;
    uint64_t site_noise_a = 0;
    uint64_t site_noise_b = 0;

    static PairTrainSeeds derive(const SeedBundle& bundle, int pair_index, int website_a,
                                 int website_b);
};

/// Adversarial training of one website pair against a fresh discriminator
/// and the frozen auxiliary classifier, following the published iteration
/// interleaving. The label-1 side of the discriminator is website A (the
/// first-listed website of the pair).
std::pair<TransformerSpec, TransformerSpec> train_pair(
    const TraceCorpus& ts_a, const TraceCorpus& ts_b, int website_a, int website_b,
    const NetworkModel& auxiliary, const TrainConfig& config, TransformMode mode,
    const PairTrainSeeds& seeds, PairOutcome* outcome = nullptr,
    const ProgressSink* sink = nullptr);

/// Full training run: auxiliary pre-training, pairing, independent per-pair
/// adversarial training (parallel across pairs when jobs > 1, with identical
/// results), and assembly of the transformer set.
TrainedSet train_transformer_set(const TraceCorpus& corpus, const TrainConfig& config,
                                 TransformMode mode, const SeedBundle& seeds, int jobs = 1,
                                 const ProgressSink* sink = nullptr);

} // namespace awa
