#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "awa/archive.hpp"
#include "awa/corpus_io.hpp"
#include "awa/log.hpp"
#include "awa/manifest.hpp"
#include "awa/report_io.hpp"
#include "awa/version.hpp"

namespace fs = std::filesystem;
using namespace awa;

namespace {

struct CommonOpts {
    std::string manifest_path;
    std::string out_dir;
    std::string seed_file;
    std::string mode_override;
    int jobs = 1;
};

ExperimentManifest load(const CommonOpts& opts) {
    ExperimentManifest m = load_manifest(opts.manifest_path);
    if (!opts.seed_file.empty()) apply_seed_file(m, opts.seed_file);
    if (!opts.mode_override.empty()) m.mode = transform_mode_from_string(opts.mode_override);
    if (!opts.out_dir.empty()) m.output = opts.out_dir;
    return m;
}

CorpusSplits derive_splits(const ExperimentManifest& m) {
    TraceCorpus corpus = load_corpus(m.corpus, m.trace_length);
    return split_corpus(corpus, m.split, m.split_seed);
}

fs::path set_dir(const ExperimentManifest& m, int i) {
    return m.output / "sets" / ("set_" + std::to_string(i));
}

int cmd_split(const CommonOpts& opts) {
    ExperimentManifest m = load(opts);
    CorpusSplits splits = derive_splits(m);
    fs::path base = m.output / "splits";
    save_corpus(splits.awa_train, base / "awa_train");
    save_corpus(splits.adversary_train, base / "adv_train");
    save_corpus(splits.adversary_val, base / "adv_val");
    save_corpus(splits.target_user, base / "user");
    std::printf("split: %zu / %zu / %zu / %zu traces -> %s\n", splits.awa_train.size(),
                splits.adversary_train.size(), splits.adversary_val.size(),
                splits.target_user.size(), base.string().c_str());
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    ExperimentManifest m = load(opts);
    CorpusSplits splits = derive_splits(m);
    for (int i = 0; i < m.num_sets(); ++i) {
        const SeedBundle& bundle = m.seeds[static_cast<size_t>(i)];
        log::info("training transformer set " + std::to_string(i));
        TrainedSet trained =
            train_transformer_set(splits.awa_train, m.train, m.mode, bundle, opts.jobs);
        nlohmann::json creation = {{"manifest_hash", m.hash},
                                   {"mode", to_string(m.mode)},
                                   {"trace_length", m.trace_length},
                                   {"train", train_config_json(m.train)},
                                   {"seeds", seed_bundle_json(bundle)}};
        fs::path dir = set_dir(m, i);
        save_transformer_set(trained.set, dir, creation);
        write_training_log(trained.log, m.train, m.hash, dir / "training_manifest.json");
        std::printf("set %d: fingerprint %s -> %s\n", i,
                    hex64(trained.set.seed_fingerprint).c_str(), dir.string().c_str());
    }
    return 0;
}

int cmd_transform(const std::string& set_path, const std::string& corpus_path,
                  const std::string& out_path, const std::string& phase_name) {
    TransformerSet set = load_transformer_set(set_path);
    TraceCorpus corpus = load_corpus(corpus_path, set.trace_length);
    Phase phase = phase_name == "train" ? Phase::Train : Phase::Test;

    TraceCorpus transformed;
    transformed.num_classes = corpus.num_classes;
    transformed.labels = corpus.labels;
    for (size_t i = 0; i < corpus.traces.size(); ++i)
        transformed.traces.push_back(
            set.for_website(corpus.labels[i]).apply(corpus.traces[i], phase));

    fs::path out = out_path;
    save_corpus(transformed, out / "corpus");

    std::string hash = hex64(set.seed_fingerprint);
    if (phase == Phase::Test) {
        std::vector<double> bwo = per_class_bwo(set, corpus);
        write_bwo_table(bwo, hash, out / "bwo.tsv");
        for (size_t k = 0; k < bwo.size(); ++k)
            std::printf("class %zu: BWO %.2f%%\n", k, bwo[k]);
    }
    write_average_trace_table(corpus, transformed, hash, out / "avg_trace.tsv");
    std::printf("transformed %zu traces -> %s\n", corpus.traces.size(),
                (out / "corpus").string().c_str());
    return 0;
}

int cmd_evaluate(const CommonOpts& opts) {
    ExperimentManifest m = load(opts);
    CorpusSplits splits = derive_splits(m);

    std::vector<TransformerSet> sets;
    for (int i = 0; i < m.num_sets(); ++i) {
        fs::path dir = set_dir(m, i);
        if (!fs::exists(dir / "manifest.json"))
            throw IoError("missing transformer set " + std::to_string(i) + " at " +
                          dir.string() + " (run `awa train` first)");
        sets.push_back(load_transformer_set(dir));
    }
    std::vector<const TransformerSet*> set_ptrs;
    for (const TransformerSet& s : sets) set_ptrs.push_back(&s);

    SealedCorpus user(splits.target_user);
    ExperimentReport report = run_scenario1(set_ptrs, splits.adversary_train,
                                            splits.adversary_val, user, m.scenario, opts.jobs);
    report.combination = run_scenario2(set_ptrs, splits.adversary_train, splits.adversary_val,
                                       user, m.scenario, opts.jobs);
    report.intra_cd = intra_cd(set_ptrs, splits.awa_train, KernelConfig{m.kernel_bandwidth});
    report.tool_version = kToolVersion;
    report.manifest_hash = m.hash;

    fs::path out = m.output / "report";
    write_experiment_report(report, m.hash, out);
    write_intra_cd_report(report.intra_cd, m.hash, out);
    std::printf("scenario 1: mean same-set %.2f%%, mean cross-set %.2f%%\n",
                report.mean_diagonal(), report.mean_off_diagonal());
    for (size_t j = 0; j < report.combination.size(); ++j)
        std::printf("scenario 2, user set %zu: %.2f%%\n", j, report.combination[j]);
    std::printf("report -> %s\n", out.string().c_str());
    return 0;
}

int cmd_metrics(const CommonOpts& opts, const std::string& corpus_override) {
    ExperimentManifest m = load(opts);

    std::vector<TransformerSet> sets;
    for (int i = 0; i < m.num_sets(); ++i) {
        fs::path dir = set_dir(m, i);
        if (!fs::exists(dir / "manifest.json"))
            throw IoError("missing transformer set " + std::to_string(i) + " at " + dir.string());
        sets.push_back(load_transformer_set(dir));
    }
    std::vector<const TransformerSet*> set_ptrs;
    for (const TransformerSet& s : sets) set_ptrs.push_back(&s);

    TraceCorpus corpus = corpus_override.empty()
                             ? derive_splits(m).awa_train
                             : load_corpus(corpus_override, m.trace_length);
    IntraCDReport report = intra_cd(set_ptrs, corpus, KernelConfig{m.kernel_bandwidth});
    fs::path out = m.output / "metrics";
    write_intra_cd_report(report, m.hash, out);
    std::printf("avg intra-CD %.6f, min intra-CD %.6f -> %s\n", report.avg_intra_cd,
                report.min_intra_cd, out.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial website adaptation: train per-website trace transformers and "
                 "evaluate them against simulated fingerprinting adversaries"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

    CommonOpts opts;
    std::string set_path, corpus_path, out_path, phase = "test", corpus_override;

    auto add_common = [&](CLI::App* cmd, bool with_jobs) {
        cmd->add_option("--manifest", opts.manifest_path, "experiment manifest (JSON)")
            ->required();
        cmd->add_option("--out", opts.out_dir, "output directory (overrides manifest)");
        cmd->add_option("--seed-file", opts.seed_file, "JSON array of seed bundles");
        if (with_jobs)
            cmd->add_option("--jobs", opts.jobs, "parallel workers")->check(CLI::PositiveNumber);
    };

    CLI::App* split = app.add_subcommand("split", "write the four-way corpus split");
    add_common(split, false);

    CLI::App* train = app.add_subcommand("train", "train one transformer set per seed bundle");
    add_common(train, true);
    train->add_option("--mode", opts.mode_override, "universal|non-universal")
        ->check(CLI::IsMember({"universal", "non-universal"}));

    CLI::App* transform = app.add_subcommand("transform", "apply a transformer set to a corpus");
    transform->add_option("--set", set_path, "transformer-set archive directory")->required();
    transform->add_option("--corpus", corpus_path, "corpus directory")->required();
    transform->add_option("--out", out_path, "output directory")->required();
    transform->add_option("--phase", phase, "train|test")->check(CLI::IsMember({"train", "test"}));

    CLI::App* evaluate = app.add_subcommand("evaluate", "run scenarios 1 and 2 plus intra-CD");
    add_common(evaluate, true);

    CLI::App* metrics = app.add_subcommand("metrics", "intra-class distance across trained sets");
    add_common(metrics, false);
    metrics->add_option("--corpus", corpus_override,
                        "corpus directory (default: awa_train split)");

    try {
        app.parse(argc, argv);
        if (split->parsed()) return cmd_split(opts);
        if (train->parsed()) return cmd_train(opts);
        if (transform->parsed()) return cmd_transform(set_path, corpus_path, out_path, phase);
        if (evaluate->parsed()) return cmd_evaluate(opts);
        if (metrics->parsed()) return cmd_metrics(opts, corpus_override);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
