#include "awa/report_io.hpp"

#include <fstream>

#include "awa/version.hpp"

namespace awa {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& file) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void table_header(std::ofstream& out, const std::string& manifest_hash) {
    out << "# " << kToolName << ' ' << kToolVersion << " manifest=" << manifest_hash << '\n';
}

} // namespace

void write_training_log(const TrainingLog& log, const TrainConfig& config,
                        const std::string& manifest_hash, const fs::path& file) {
    json pairs = json::array();
    for (const PairOutcome& p : log.pairs) {
        json iters = json::array();
        for (const IterationStats& s : p.iterations)
            iters.push_back({{"iteration", s.iteration},
                             {"disc_loss", s.disc_loss},
                             {"gen_a_loss", s.gen_a_loss},
                             {"gen_b_loss", s.gen_b_loss},
                             {"bwo_a", s.bwo_a},
                             {"bwo_b", s.bwo_b},
                             {"gate_satisfied", s.gate_satisfied}});
        pairs.push_back({{"pair_index", p.pair_index},
                         {"website_a", p.website_a},
                         {"website_b", p.website_b},
                         {"selected_iteration", p.selected_iteration},
                         {"used_fallback", p.used_fallback},
                         {"iterations", iters}});
    }
    json doc = {{"tool_version", kToolVersion},
                {"manifest_hash", manifest_hash},
                {"seed_fingerprint", hex64(log.seed_fingerprint)},
                {"config", train_config_json(config)},
                {"pairs", pairs}};
    auto out = open_out(file);
    out << doc.dump(2) << '\n';
}

void write_experiment_report(const ExperimentReport& report, const std::string& manifest_hash,
                             const fs::path& dir) {
    const int S = report.num_sets;

    json acc = json::array();
    for (int j = 0; j < S; ++j) {
        json row = json::array();
        for (int i = 0; i < S; ++i) row.push_back(report.accuracy(j, i));
        acc.push_back(row);
    }
    json doc = {{"tool_version", kToolVersion},
                {"manifest_hash", manifest_hash},
                {"mode", to_string(report.mode)},
                {"num_sets", S},
                {"accuracy_user_by_adversary", acc},
                {"adversary_bwo", report.adversary_bwo},
                {"user_bwo", report.user_bwo},
                {"scenario2_combination", report.combination},
                {"mean_diagonal", report.mean_diagonal()},
                {"mean_off_diagonal", report.mean_off_diagonal()},
                {"intra_cd",
                 {{"avg", report.intra_cd.avg_intra_cd},
                  {"min", report.intra_cd.min_intra_cd},
                  {"estimator", report.intra_cd.estimator}}}};
    {
        auto out = open_out(dir / "report.json");
        out << doc.dump(2) << '\n';
    }
    {
        auto out = open_out(dir / "accuracy_matrix.tsv");
        table_header(out, manifest_hash);
        out << "user_set";
        for (int i = 0; i < S; ++i) out << "\tadversary_set_" << i;
        out << "\tcombination\n";
        for (int j = 0; j < S; ++j) {
            out << j;
            for (int i = 0; i < S; ++i) out << '\t' << fmt(report.accuracy(j, i));
            out << '\t'
                << (j < static_cast<int>(report.combination.size())
                        ? fmt(report.combination[static_cast<size_t>(j)])
                        : "nan")
                << '\n';
        }
    }
    {
        auto out = open_out(dir / "bwo.tsv");
        table_header(out, manifest_hash);
        out << "set\tadversary_bwo\tuser_bwo\n";
        for (int i = 0; i < S; ++i)
            out << i << '\t' << fmt(report.adversary_bwo[static_cast<size_t>(i)]) << '\t'
                << fmt(report.user_bwo[static_cast<size_t>(i)]) << '\n';
    }
}

void write_intra_cd_report(const IntraCDReport& report, const std::string& manifest_hash,
                           const fs::path& dir) {
    json doc = {{"tool_version", kToolVersion},
                {"manifest_hash", manifest_hash},
                {"num_classes", report.num_classes},
                {"num_sets", report.num_sets},
                {"avg_intra_cd", report.avg_intra_cd},
                {"min_intra_cd", report.min_intra_cd},
                {"estimator", report.estimator}};
    {
        auto out = open_out(dir / "intra_cd.json");
        out << doc.dump(2) << '\n';
    }
    {
        auto out = open_out(dir / "intra_cd.tsv");
        table_header(out, manifest_hash);
        out << "class\tset_i\tset_j\tmmd\n";
        for (int k = 0; k < report.num_classes; ++k)
            for (int i = 0; i < report.num_sets; ++i)
                for (int j = i + 1; j < report.num_sets; ++j)
                    out << k << '\t' << i << '\t' << j << '\t'
                        << fmt(report.distance[static_cast<size_t>(k)](i, j)) << '\n';
    }
}

void write_bwo_table(const std::vector<double>& per_class, const std::string& manifest_hash,
                     const fs::path& file) {
    auto out = open_out(file);
    table_header(out, manifest_hash);
    out << "class\tbwo\n";
    for (size_t k = 0; k < per_class.size(); ++k)
        out << k << '\t' << fmt(per_class[k]) << '\n';
}

void write_average_trace_table(const TraceCorpus& original, const TraceCorpus& transformed,
                               const std::string& manifest_hash, const fs::path& file) {
    if (original.traces.size() != transformed.traces.size())
        throw CompareError("average-trace table: corpora sizes differ");
    auto out = open_out(file);
    table_header(out, manifest_hash);
    out << "class\tburst_index\toriginal\ttransformed\n";
    for (int k = 0; k < original.num_classes; ++k) {
        std::vector<FixedTrace> orig, trans;
        for (size_t i = 0; i < original.traces.size(); ++i) {
            if (original.labels[i] != k) continue;
            orig.push_back(original.traces[i]);
            trans.push_back(transformed.traces[i]);
        }
        if (orig.empty()) continue;
        std::vector<double> om = average_trace(orig);
        std::vector<double> tm = average_trace(trans);
        for (size_t j = 0; j < om.size(); ++j)
            out << k << '\t' << j << '\t' << fmt(om[j]) << '\t' << fmt(tm[j]) << '\n';
    }
}

} // namespace awa
