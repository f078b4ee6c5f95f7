#include "awa/harness.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "awa/data.hpp"
#include "awa/log.hpp"

namespace awa {

void ScenarioConfig::validate() const {
    if (epochs < 1 || batch_size < 1) throw ConfigError("scenario epochs and batch size must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("scenario learning rate must be positive");
}

namespace {

std::map<std::string, ClassifierFactory>& registry() {
    static std::map<std::string, ClassifierFactory> r = {
        {"standin",
         [](int length, int num_classes, uint64_t seed) {
             return build_discriminator(length, num_classes, seed);
         }},
    };
    return r;
}

std::mutex registry_mutex;

} // namespace

void register_classifier(const std::string& name, ClassifierFactory factory) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    registry()[name] = std::move(factory);
}

ClassifierFactory classifier_factory(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto it = registry().find(name);
    if (it == registry().end())
        throw ConfigError("no classifier registered under '" + name + "'");
    return it->second;
}

SealedCorpus::SealedCorpus(TraceCorpus corpus) : corpus_(std::move(corpus)) {
    corpus_.validate();
}

double SealedCorpus::score(const NetworkModel& model) const {
    return classifier_accuracy(model, corpus_);
}

SealedCorpus SealedCorpus::transformed_by(const TransformerSet& set) const {
    return SealedCorpus(generate_adversarial_corpus(set, corpus_));
}

double SealedCorpus::mean_bwo(const TransformerSet& set) const {
    std::vector<double> per_class = per_class_bwo(set, corpus_);
    double sum = 0.0;
    for (double v : per_class) sum += v;
    return per_class.empty() ? 0.0 : sum / per_class.size();
}

TraceCorpus generate_adversarial_corpus(const TransformerSet& set, const TraceCorpus& corpus) {
    corpus.validate();
    if (corpus.num_classes > set.num_classes)
        throw CoverageError("transformer set covers " + std::to_string(set.num_classes) +
                            " classes, corpus has " + std::to_string(corpus.num_classes));
    TraceCorpus out;
    out.num_classes = corpus.num_classes;
    out.labels = corpus.labels;
    out.traces.reserve(corpus.traces.size());
    for (size_t i = 0; i < corpus.traces.size(); ++i)
        out.traces.push_back(
            set.for_website(corpus.labels[i]).apply(corpus.traces[i], Phase::Test));
    return out;
}

NetworkModel train_adversary_classifier(const TraceCorpus& train, const TraceCorpus& val,
                                        const ScenarioConfig& config, uint64_t seed) {
    config.validate();
    train.validate();
    val.validate();
    if (train.traces.empty()) throw TrainError("adversary training corpus is empty");

    const int L = train.traces.front().length();
    const int K = train.num_classes;
    NetworkModel model = classifier_factory(config.classifier)(
        L, K, hash_tag(seed, "adversary.params"));
    AdamOptimizer opt(config.learning_rate);
    Rng order_rng(hash_tag(seed, "adversary.order"));
    Eigen::MatrixXd all = corpus_matrix(train);

    std::vector<int> indices(train.traces.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
    const int bs = std::min<int>(config.batch_size, static_cast<int>(indices.size()));

    // Validation-based selection: keep the parameters of the best epoch.
    Eigen::VectorXd best_params = model.params();
    Eigen::VectorXd best_state = model.bn_state();
    double best_acc = -1.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        order_rng.shuffle(indices);
        for (size_t start = 0; start < indices.size(); start += static_cast<size_t>(bs)) {
            size_t end = std::min(indices.size(), start + static_cast<size_t>(bs));
            std::vector<int> batch_idx(indices.begin() + static_cast<long>(start),
                                       indices.begin() + static_cast<long>(end));
            std::vector<int> labels;
            labels.reserve(batch_idx.size());
            for (int i : batch_idx) labels.push_back(train.labels[static_cast<size_t>(i)]);
            grad_step(model, opt,
                      [&](const ForwardResult& res) {
                          MatrixLoss l = loss_auxiliary(res.output.m, labels);
                          return LossGrad{l.value, Tensor(l.grad, res.output.shape), false};
                      },
                      rows_to_tensor(all, batch_idx));
        }
        double acc = classifier_accuracy(model, val);
        if (acc > best_acc) {
            best_acc = acc;
            best_params = model.params();
            best_state = model.bn_state();
        }
    }
    model.params() = best_params;
    model.bn_state() = best_state;
    return model;
}

double ExperimentReport::mean_diagonal() const {
    return accuracy.diagonal().mean();
}

double ExperimentReport::mean_off_diagonal() const {
    double sum = 0.0;
    int n = 0;
    for (Eigen::Index j = 0; j < accuracy.rows(); ++j)
        for (Eigen::Index i = 0; i < accuracy.cols(); ++i)
            if (i != j) {
                sum += accuracy(j, i);
                ++n;
            }
    return n == 0 ? 0.0 : sum / n;
}

namespace {

// Runs f(0..n-1) on up to `jobs` worker threads; rethrows the first failure.
void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

ExperimentReport run_scenario1(const std::vector<const TransformerSet*>& sets,
                               const TraceCorpus& adversary_train,
                               const TraceCorpus& adversary_val, const SealedCorpus& user,
                               const ScenarioConfig& config, int jobs) {
    const int S = static_cast<int>(sets.size());
    if (S < 2) throw InsufficientSets("scenario 1 needs at least two transformer sets");
    config.validate();

    ExperimentReport report;
    report.num_sets = S;
    report.mode = sets.front()->mode;
    report.accuracy = Eigen::MatrixXd::Zero(S, S);

    std::vector<SealedCorpus> user_by_set;
    user_by_set.reserve(static_cast<size_t>(S));
    for (int j = 0; j < S; ++j) user_by_set.push_back(user.transformed_by(*sets[j]));

    parallel_for(S, jobs, [&](int i) {
        TraceCorpus train_i = generate_adversarial_corpus(*sets[i], adversary_train);
        TraceCorpus val_i = generate_adversarial_corpus(*sets[i], adversary_val);
        NetworkModel clf = train_adversary_classifier(
            train_i, val_i, config, hash_combine(hash_tag(config.seed, "scenario1"), i));
        for (int j = 0; j < S; ++j)
            report.accuracy(j, i) = user_by_set[static_cast<size_t>(j)].score(clf);
        log::info("scenario1: adversary set " + std::to_string(i) + " done");
    });

    for (int i = 0; i < S; ++i) {
        std::vector<double> adv = per_class_bwo(*sets[i], adversary_train);
        double mean_adv = 0.0;
        for (double v : adv) mean_adv += v;
        report.adversary_bwo.push_back(mean_adv / adv.size());
        report.user_bwo.push_back(user.mean_bwo(*sets[i]));
    }
    return report;
}

std::vector<double> run_scenario2(const std::vector<const TransformerSet*>& sets,
                                  const TraceCorpus& adversary_train,
                                  const TraceCorpus& adversary_val, const SealedCorpus& user,
                                  const ScenarioConfig& config, int jobs) {
    const int S = static_cast<int>(sets.size());
    if (S < 2) throw InsufficientSets("scenario 2 needs at least two transformer sets");
    config.validate();

    std::vector<double> out(static_cast<size_t>(S), 0.0);
    parallel_for(S, jobs, [&](int j) {
        TraceCorpus union_train, union_val;
        union_train.num_classes = adversary_train.num_classes;
        union_val.num_classes = adversary_val.num_classes;
        for (int i = 0; i < S; ++i) {
            if (i == j) continue;
            TraceCorpus t = generate_adversarial_corpus(*sets[i], adversary_train);
            TraceCorpus v = generate_adversarial_corpus(*sets[i], adversary_val);
            union_train.traces.insert(union_train.traces.end(), t.traces.begin(), t.traces.end());
            union_train.labels.insert(union_train.labels.end(), t.labels.begin(), t.labels.end());
            union_val.traces.insert(union_val.traces.end(), v.traces.begin(), v.traces.end());
            union_val.labels.insert(union_val.labels.end(), v.labels.begin(), v.labels.end());
        }
        NetworkModel clf = train_adversary_classifier(
            union_train, union_val, config, hash_combine(hash_tag(config.seed, "scenario2"), j));
        out[static_cast<size_t>(j)] = user.transformed_by(*sets[j]).score(clf);
        log::info("scenario2: user set " + std::to_string(j) + " done");
    });
    return out;
}

namespace {

std::string fmt_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

ModeComparison compare_modes(const ExperimentReport& universal,
                             const ExperimentReport& non_universal) {
    if (universal.num_sets != non_universal.num_sets)
        throw CompareError("reports cover different numbers of transformer sets");
    if (universal.mode == non_universal.mode)
        throw CompareError("compare_modes expects one universal and one non-universal report");

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / v.size();
    };

    ModeComparison cmp;
    cmp.rows.push_back("experiment\tacc_same_set\tacc_cross_set\tacc_combination\tbwo");
    auto row = [&](const char* name, const ExperimentReport& r) {
        cmp.rows.push_back(std::string(name) + "\t" + fmt_pct(r.mean_diagonal()) + "\t" +
                           fmt_pct(r.mean_off_diagonal()) + "\t" + fmt_pct(mean(r.combination)) +
                           "\t" + fmt_pct(mean(r.adversary_bwo)));
    };
    row("universal", universal);
    row("non-universal", non_universal);
    cmp.rows.push_back(
        "delta\t" + fmt_pct(universal.mean_diagonal() - non_universal.mean_diagonal()) + "\t" +
        fmt_pct(universal.mean_off_diagonal() - non_universal.mean_off_diagonal()) + "\t" +
        fmt_pct(mean(universal.combination) - mean(non_universal.combination)) + "\t" +
        fmt_pct(mean(universal.adversary_bwo) - mean(non_universal.adversary_bwo)));
    // Published full-scale reference (DF adversary, 94 websites), for context
    // only; desk-scale runs are not expected to reproduce it.
    cmp.rows.push_back("reference-full-scale-universal\t98.40\t19.52\t63.52\t22.28");
    cmp.rows.push_back("reference-full-scale-non-universal\t94.13\t31.94\t61.28\t26.28");
    return cmp;
}

} // namespace awa
