#include "awa/trainer.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

#include "awa/data.hpp"
#include "awa/log.hpp"

namespace awa {

void TrainConfig::validate() const {
    if (iterations < 1 || disc_steps < 1 || gen_steps < 1 || batch_size < 1)
        throw ConfigError("iterations, disc_steps, gen_steps and batch_size must be >= 1");
    weights.validate();
    if (!(overhead_gate > weights.tau_high))
        throw ConfigError("overhead gate OH must exceed tau_high");
    if (gen_lr <= 0.0 || disc_lr <= 0.0 || ac_lr <= 0.0)
        throw ConfigError("learning rates must be positive");
    if (ac_epochs < 1 || ac_batch < 1)
        throw ConfigError("auxiliary training needs ac_epochs, ac_batch >= 1");
}

GateSelector::GateSelector(double overhead_gate, int total_iterations)
    : gate_(overhead_gate), total_(total_iterations) {}

bool GateSelector::observe(int iteration, double bwo_a, double bwo_b, Snapshot snapshot) {
    bool satisfied = bwo_a <= gate_ && bwo_b <= gate_;
    if (satisfied) {
        selected_iteration_ = iteration;
        used_fallback_ = false;
        snapshot_ = std::move(snapshot);
    } else if (iteration == total_ - 1 && selected_iteration_ < 0) {
        selected_iteration_ = iteration;
        used_fallback_ = true;
        snapshot_ = std::move(snapshot);
    }
    return satisfied;
}

int GateSelector::selected_iteration() const {
    if (selected_iteration_ < 0) throw TrainError("gate selector has no selection yet");
    return selected_iteration_;
}

const GateSelector::Snapshot& GateSelector::selection() const {
    if (selected_iteration_ < 0) throw TrainError("gate selector has no selection yet");
    return snapshot_;
}

PairList select_pairs(int num_classes, uint64_t pair_seed) {
    if (num_classes < 2 || num_classes % 2 != 0)
        throw PairError("pairing requires an even number of websites, got " +
                        std::to_string(num_classes));
    std::vector<int> ids(static_cast<size_t>(num_classes));
    for (int i = 0; i < num_classes; ++i) ids[static_cast<size_t>(i)] = i;
    Rng rng(hash_tag(pair_seed, "pair_list"));
    rng.shuffle(ids);
    PairList pairs;
    for (int i = 0; i < num_classes; i += 2) {
        int a = ids[static_cast<size_t>(i)], b = ids[static_cast<size_t>(i + 1)];
        pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    return pairs;
}

NetworkModel pretrain_auxiliary(const TraceCorpus& corpus, const TrainConfig& config,
                                uint64_t seed) {
    config.validate();
    corpus.validate();
    if (corpus.traces.empty()) throw TrainError("auxiliary training corpus is empty");
    if (corpus.num_classes < 2)
        throw TrainError("auxiliary classifier needs at least two classes");
    for (int c = 0; c < corpus.num_classes; ++c)
        if (corpus.class_indices(c).empty())
            throw TrainError("class " + std::to_string(c) + " has no traces");

    const int L = corpus.traces.front().length();
    NetworkModel model =
        build_discriminator(L, corpus.num_classes, hash_tag(seed, "ac.params"));
    AdamOptimizer opt(config.ac_lr);
    Rng order_rng(hash_tag(seed, "ac.order"));
    Eigen::MatrixXd all = corpus_matrix(corpus);

    std::vector<int> indices(corpus.traces.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);

    const int bs = std::min<int>(config.ac_batch, static_cast<int>(indices.size()));
    for (int epoch = 0; epoch < config.ac_epochs; ++epoch) {
        order_rng.shuffle(indices);
        for (size_t start = 0; start < indices.size(); start += static_cast<size_t>(bs)) {
            size_t end = std::min(indices.size(), start + static_cast<size_t>(bs));
            std::vector<int> batch_idx(indices.begin() + static_cast<long>(start),
                                       indices.begin() + static_cast<long>(end));
            std::vector<int> labels;
            labels.reserve(batch_idx.size());
            for (int i : batch_idx) labels.push_back(corpus.labels[static_cast<size_t>(i)]);
            Tensor batch = rows_to_tensor(all, batch_idx);
            grad_step(model, opt,
                      [&](const ForwardResult& res) {
                          MatrixLoss l = loss_auxiliary(res.output.m, labels);
                          return LossGrad{l.value, Tensor(l.grad, res.output.shape), false};
                      },
                      batch);
        }
    }
    return model;
}

PairTrainSeeds PairTrainSeeds::derive(const SeedBundle& bundle, int pair_index, int website_a,
                                      int website_b) {
    PairTrainSeeds s;
    s.pair = PairSeeds::derive(bundle, pair_index);
    s.site_noise_a = website_noise_seed(bundle, website_a);
    s.site_noise_b = website_noise_seed(bundle, website_b);
    return s;
}

namespace {

Eigen::MatrixXd gaussian_rows(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.gaussian();
    return m;
}

Eigen::VectorXd site_noise_vector(uint64_t seed, int length) {
    Rng rng(seed);
    Eigen::VectorXd z(length);
    for (int i = 0; i < length; ++i) z(i) = rng.gaussian();
    return z;
}

// One side of the adversarial game, owning its generator and optimizer.
struct GenSide {
    NetworkModel gen;
    AdamOptimizer opt;
    Eigen::MatrixXd traces; // full training slice, one row per trace
    std::vector<int> labels;
    Eigen::VectorXd site_noise;
    int website = 0;

    GenSide(int length, uint64_t init_seed, double lr, const TraceCorpus& slice,
            uint64_t noise_seed, int website_id)
        : gen(build_generator(length, init_seed)), opt(lr), traces(corpus_matrix(slice)),
          labels(slice.labels), site_noise(site_noise_vector(noise_seed, length)),
          website(website_id) {}
};

Eigen::VectorXd as_vector(const Tensor& t) {
    if (t.shape.features() != 1) throw ShapeError("expected scalar network output");
    return t.m.col(0);
}

// Produces train-phase adversarial traces for a batch: runs the generator in
// training mode and applies the perturbation to the trace batch.
struct GenBatch {
    Tensor input;
    NetworkCache cache;
    Eigen::MatrixXd perturbation;
    Eigen::MatrixXd transformed;
};

GenBatch gen_forward(GenSide& side, const Eigen::MatrixXd& batch_traces,
                     TransformMode mode, Rng& noise_rng) {
    GenBatch out;
    const int L = static_cast<int>(batch_traces.cols());
    if (mode == TransformMode::Universal)
        out.input = rows_to_tensor(
            gaussian_rows(noise_rng, static_cast<int>(batch_traces.rows()), L));
    else
        out.input = rows_to_tensor(batch_traces);
    ForwardResult res = side.gen.forward(out.input, &out.cache);
    out.perturbation = res.output.m;
    out.transformed = apply_perturbation_batch(out.perturbation, batch_traces);
    return out;
}

// Test-phase overhead of the current generator over its full slice, as the
// ratio of total added volume to total original volume.
double gate_overhead(const GenSide& side, TransformMode mode) {
    const int L = static_cast<int>(side.traces.cols());
    Eigen::MatrixXd pert;
    if (mode == TransformMode::Universal) {
        Eigen::MatrixXd zin(1, L);
        zin.row(0) = side.site_noise.transpose();
        Eigen::VectorXd p = side.gen.infer(rows_to_tensor(zin)).output.m.row(0);
        pert = p.transpose().replicate(side.traces.rows(), 1);
    } else {
        pert = side.gen.infer(rows_to_tensor(side.traces)).output.m;
    }
    Eigen::MatrixXd t = apply_perturbation_batch(pert, side.traces);
    double added = 0.0, base = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            added += std::abs(round_magnitude(t(i, j))) - std::abs(side.traces(i, j));
            base += std::abs(side.traces(i, j));
        }
    if (base == 0.0) throw DegenerateTrace("training slice has zero volume");
    return added / base;
}

std::vector<int> batch_indices(Rng& rng, int available, int batch_size) {
    return rng.sample_indices(available, std::min(batch_size, available));
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
    return out;
}

void check_finite(double v, const char* what, int iteration) {
    if (!std::isfinite(v))
        throw NumericalError(std::string(what) + " became non-finite at iteration " +
                             std::to_string(iteration));
}

} // namespace

std::pair<TransformerSpec, TransformerSpec> train_pair(
    const TraceCorpus& ts_a, const TraceCorpus& ts_b, int website_a, int website_b,
    const NetworkModel& auxiliary, const TrainConfig& config, TransformMode mode,
    const PairTrainSeeds& seeds, PairOutcome* outcome, const ProgressSink* sink) {
    config.validate();
    if (ts_a.traces.empty() || ts_b.traces.empty())
        throw TrainError("pair training slices must be nonempty");

    const int L = ts_a.traces.front().length();
    GenSide side_a(L, seeds.pair.gen_a_init, config.gen_lr, ts_a, seeds.site_noise_a, website_a);
    GenSide side_b(L, seeds.pair.gen_b_init, config.gen_lr, ts_b, seeds.site_noise_b, website_b);
    NetworkModel disc = build_discriminator(L, 1, seeds.pair.disc_init);
    AdamOptimizer disc_opt(config.disc_lr);

    Rng data_rng(seeds.pair.data_order);
    Rng noise_rng(seeds.pair.noise);

    const int na = static_cast<int>(side_a.traces.rows());
    const int nb = static_cast<int>(side_b.traces.rows());

    // One discriminator update on fresh batches from both sides. Website A
    // carries transformer label 1.
    auto disc_step = [&](int iteration) {
        Eigen::MatrixXd xa = select_rows(side_a.traces, batch_indices(data_rng, na, config.batch_size));
        Eigen::MatrixXd xb = select_rows(side_b.traces, batch_indices(data_rng, nb, config.batch_size));
        GenBatch ga = gen_forward(side_a, xa, mode, noise_rng);
        GenBatch gb = gen_forward(side_b, xb, mode, noise_rng);

        NetworkCache ca, cb;
        ForwardResult ra = disc.forward(rows_to_tensor(ga.transformed), &ca);
        ForwardResult rb = disc.forward(rows_to_tensor(gb.transformed), &cb);
        PairDiscriminatorLoss l = loss_discriminator(as_vector(ra.output), as_vector(rb.output));
        check_finite(l.value, "discriminator loss", iteration);

        Eigen::VectorXd grads = Eigen::VectorXd::Zero(disc.params().size());
        disc.backward(Tensor(l.grad_a, ra.output.shape), ca, &grads);
        disc.backward(Tensor(l.grad_b, rb.output.shape), cb, &grads);
        disc_opt.step(disc.params(), grads);
        return l.value;
    };

    // One generator update against the frozen discriminator and auxiliary
    // classifier. `label_one` marks the website-A side.
    auto gen_step = [&](GenSide& side, bool label_one, int iteration) {
        const int n = static_cast<int>(side.traces.rows());
        std::vector<int> idx = batch_indices(data_rng, n, config.batch_size);
        Eigen::MatrixXd x = select_rows(side.traces, idx);
        std::vector<int> labels;
        labels.reserve(idx.size());
        for (int i : idx) labels.push_back(side.labels[static_cast<size_t>(i)]);

        GenBatch gb = gen_forward(side, x, mode, noise_rng);
        Tensor transformed = rows_to_tensor(gb.transformed);

        NetworkCache ac_cache;
        ForwardResult ac_res = auxiliary.infer(transformed, &ac_cache);
        MatrixLoss l_ac = loss_gen_ac(ac_res.logits.m, labels);
        Tensor d_ac = auxiliary.backward_from_logits(Tensor(l_ac.grad, ac_res.logits.shape),
                                                     ac_cache, nullptr);

        MatrixLoss l_oh = loss_gen_oh(x, gb.transformed, config.weights.tau_low,
                                      config.weights.tau_high);

        NetworkCache d_cache;
        ForwardResult d_res = disc.infer(transformed, &d_cache);
        VectorLoss l_dc = loss_gen_dc(as_vector(d_res.output));
        (void)label_one; // the domain-confusion objective is label-symmetric
        Tensor d_dc = disc.backward(Tensor(l_dc.grad, d_res.output.shape), d_cache, nullptr);

        double total = loss_generator_total(l_ac.value, l_oh.value, l_dc.value, config.weights);
        check_finite(total, "generator loss", iteration);

        Eigen::MatrixXd d_transformed = config.weights.alpha * d_ac.m +
                                        config.weights.beta * l_oh.grad +
                                        config.weights.gamma * d_dc.m;
        Eigen::MatrixXd d_pert = apply_perturbation_backward(d_transformed, x);

        Eigen::VectorXd grads = Eigen::VectorXd::Zero(side.gen.params().size());
        side.gen.backward(Tensor(d_pert, Shape{1, L}), gb.cache, &grads);
        side.opt.step(side.gen.params(), grads);
        return total;
    };

    GateSelector selector(config.overhead_gate, config.iterations);
    if (outcome) {
        outcome->website_a = website_a;
        outcome->website_b = website_b;
        outcome->iterations.clear();
    }

    for (int t = 0; t < config.iterations; ++t) {
        double d_loss = 0.0, a_loss = 0.0, b_loss = 0.0;
        for (int i = 0; i < config.disc_steps; ++i) d_loss += disc_step(t);
        for (int i = 0; i < config.gen_steps; ++i) a_loss += gen_step(side_a, true, t);
        for (int i = 0; i < config.disc_steps; ++i) d_loss += disc_step(t);
        for (int i = 0; i < config.gen_steps; ++i) b_loss += gen_step(side_b, false, t);

        double bwo_a = gate_overhead(side_a, mode);
        double bwo_b = gate_overhead(side_b, mode);
        bool satisfied = selector.observe(
            t, bwo_a, bwo_b,
            GateSelector::Snapshot{side_a.gen.params(), side_a.gen.bn_state(),
                                   side_b.gen.params(), side_b.gen.bn_state()});

        IterationStats stats;
        stats.pair_index = outcome ? outcome->pair_index : 0;
        stats.website_a = website_a;
        stats.website_b = website_b;
        stats.iteration = t;
        stats.disc_loss = d_loss / (2.0 * config.disc_steps);
        stats.gen_a_loss = a_loss / config.gen_steps;
        stats.gen_b_loss = b_loss / config.gen_steps;
        stats.bwo_a = bwo_a;
        stats.bwo_b = bwo_b;
        stats.gate_satisfied = satisfied;
        if (outcome) outcome->iterations.push_back(stats);
        if (sink && *sink) (*sink)(stats);
    }

    if (outcome) {
        outcome->selected_iteration = selector.selected_iteration();
        outcome->used_fallback = selector.used_fallback();
    }

    const GateSelector::Snapshot& snap = selector.selection();
    auto make_spec = [&](int website, uint64_t noise_seed, const Eigen::VectorXd& params,
                         const Eigen::VectorXd& state) {
        TransformerSpec spec{website, mode, build_generator(L, 0), std::nullopt, noise_seed};
        spec.generator.params() = params;
        spec.generator.bn_state() = state;
        if (mode == TransformMode::Universal) {
            Eigen::VectorXd z = site_noise_vector(noise_seed, L);
            Eigen::VectorXd p = spec.perturbation_vector(nullptr, &z);
            for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::round(p(i));
            spec.cached_perturbation = p;
        }
        return spec;
    };
    TransformerSpec spec_a =
        make_spec(website_a, seeds.site_noise_a, snap.params_a, snap.state_a);
    TransformerSpec spec_b =
        make_spec(website_b, seeds.site_noise_b, snap.params_b, snap.state_b);
    return {std::move(spec_a), std::move(spec_b)};
}

TrainedSet train_transformer_set(const TraceCorpus& corpus, const TrainConfig& config,
                                 TransformMode mode, const SeedBundle& seeds, int jobs,
                                 const ProgressSink* sink) {
    config.validate();
    corpus.validate();
    if (corpus.num_classes % 2 != 0)
        throw PairError("transformer-set training needs an even class count, got " +
                        std::to_string(corpus.num_classes));
    for (int c = 0; c < corpus.num_classes; ++c)
        if (corpus.class_indices(c).empty())
            throw TrainError("class " + std::to_string(c) + " has no traces");

    const int K = corpus.num_classes;
    const int L = corpus.traces.front().length();

    NetworkModel auxiliary = pretrain_auxiliary(
        corpus, config, hash_combine(hash_tag(seeds.param_init, "ac"), seeds.data_order));
    PairList pairs = select_pairs(K, seeds.pair_list);

    std::vector<std::optional<TransformerSpec>> specs(static_cast<size_t>(K));
    std::vector<PairOutcome> outcomes(pairs.size());
    std::mutex sink_mutex;
    ProgressSink locked_sink;
    if (sink && *sink)
        locked_sink = [&](const IterationStats& s) {
            std::lock_guard<std::mutex> lock(sink_mutex);
            (*sink)(s);
        };

    std::exception_ptr error;
    std::mutex error_mutex;
    auto run_pair = [&](size_t p) {
        try {
            const auto [a, b] = pairs[p];
            PairTrainSeeds ps = PairTrainSeeds::derive(seeds, static_cast<int>(p), a, b);
            outcomes[p].pair_index = static_cast<int>(p);
            auto [spec_a, spec_b] =
                train_pair(corpus.class_slice(a), corpus.class_slice(b), a, b, auxiliary,
                           config, mode, ps, &outcomes[p],
                           locked_sink ? &locked_sink : nullptr);
            specs[static_cast<size_t>(a)] = std::move(spec_a);
            specs[static_cast<size_t>(b)] = std::move(spec_b);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1 || pairs.size() <= 1) {
        for (size_t p = 0; p < pairs.size(); ++p) run_pair(p);
    } else {
        std::vector<std::thread> workers;
        std::atomic<size_t> next{0};
        int nworkers = std::min<int>(jobs, static_cast<int>(pairs.size()));
        for (int w = 0; w < nworkers; ++w)
            workers.emplace_back([&] {
                for (size_t p = next.fetch_add(1); p < pairs.size(); p = next.fetch_add(1))
                    run_pair(p);
            });
        for (auto& w : workers) w.join();
    }
    if (error) std::rethrow_exception(error);

    TrainedSet out;
    out.set.num_classes = K;
    out.set.trace_length = L;
    out.set.mode = mode;
    out.set.pair_list = pairs;
    out.set.seed_fingerprint = seeds.fingerprint();
    for (int w = 0; w < K; ++w) {
        if (!specs[static_cast<size_t>(w)])
            throw TrainError("pairing left website " + std::to_string(w) + " untrained");
        out.set.transformers.push_back(std::move(*specs[static_cast<size_t>(w)]));
    }
    out.log.seed_fingerprint = seeds.fingerprint();
    out.log.pairs = std::move(outcomes);
    return out;
}

} // namespace awa
