#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "awa/archive.hpp"
#include "awa/corpus_io.hpp"
#include "awa/transformer.hpp"
#include "support.hpp"

using namespace awa;
namespace fs = std::filesystem;
using json = nlohmann::json;

#ifndef AWA_CLI_PATH
#error "AWA_CLI_PATH must point at the awa binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
    fs::path out_file = scratch / "stdout.txt";
    fs::path err_file = scratch / "stderr.txt";
    std::string cmd = std::string(AWA_CLI_PATH) + " " + args + " >" + out_file.string() +
                      " 2>" + err_file.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Compares two directory trees byte for byte.
bool trees_identical(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> rel_a, rel_b;
    for (auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a));
    for (auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b));
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const fs::path& rel : rel_a)
        if (file_bytes(a / rel) != file_bytes(b / rel)) return false;
    return true;
}

// Writes a small two-class workspace: corpus plus manifest.
fs::path write_workspace(const fs::path& dir, int per_class = 18,
                         const std::string& extra_split = "") {
    TraceCorpus corpus = awa::testing::synth_corpus(2, 16, per_class, 2024);
    save_corpus(corpus, dir / "corpus");

    std::string split = extra_split.empty()
                            ? R"({"awa_train": 8, "adversary_train": 5, "adversary_val": 2, "target_user": 3, "seed": 7})"
                            : extra_split;
    std::ofstream m(dir / "manifest.json");
    m << R"({
  "corpus": "corpus",
  "trace_length": 16,
  "mode": "universal",
  "split": )" << split
      << R"(,
  "train": {"iterations": 2, "disc_steps": 1, "gen_steps": 1, "batch_size": 8,
            "overhead_gate": 0.5, "gen_lr": 0.001, "disc_lr": 0.001,
            "ac_epochs": 2, "ac_batch": 16},
  "seeds": [{"param_init": 1, "data_order": 2, "pair_list": 3, "noise": 4},
            {"param_init": 9, "data_order": 8, "pair_list": 7, "noise": 6}],
  "scenario": {"epochs": 2, "batch_size": 8, "lr": 0.001, "seed": 5},
  "output": "out"
})";
    m.close();
    return dir / "manifest.json";
}

} // namespace

TEST_CASE("split command writes four directories deterministically") {
    awa::testing::TempDir dir("cli_split");
    fs::path manifest = write_workspace(dir.path());

    RunResult r = run_cli("split --manifest " + manifest.string(), dir.path());
    CHECK(r.exit_code == 0);
    for (const char* name : {"awa_train", "adv_train", "adv_val", "user"})
        CHECK(fs::exists(dir.path() / "out" / "splits" / name / "class_0.txt"));

    TraceCorpus awa_train = load_corpus(dir.path() / "out" / "splits" / "awa_train", 16);
    CHECK(awa_train.size() == 16); // 8 per class x 2

    // identical rerun
    fs::path first = dir.path() / "first_splits";
    fs::copy(dir.path() / "out" / "splits", first, fs::copy_options::recursive);
    RunResult again = run_cli("split --manifest " + manifest.string(), dir.path());
    CHECK(again.exit_code == 0);
    CHECK(trees_identical(first, dir.path() / "out" / "splits"));
}

TEST_CASE("split rejects infeasible specs with a data-error exit naming the class") {
    awa::testing::TempDir dir("cli_splitbad");
    fs::path manifest = write_workspace(
        dir.path(), 18,
        R"({"awa_train": 10, "adversary_train": 5, "adversary_val": 2, "target_user": 3, "seed": 7})");
    RunResult r = run_cli("split --manifest " + manifest.string(), dir.path());
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("class 0") != std::string::npos);
}

TEST_CASE("corrupt manifest fails with a config-error exit and a line number") {
    awa::testing::TempDir dir("cli_corrupt");
    write_workspace(dir.path());
    {
        std::ofstream bad(dir.path() / "manifest.json");
        bad << "{\n  \"corpus\": \"corpus\",\n  \"oops\n}\n";
    }
    RunResult r = run_cli("split --manifest " + (dir.path() / "manifest.json").string(),
                          dir.path());
    CHECK(r.exit_code == 2);
    size_t pos = r.err.find("manifest.json:");
    REQUIRE(pos != std::string::npos);
    CHECK(std::isdigit(static_cast<unsigned char>(r.err[pos + 14])));
}

TEST_CASE("train, transform, evaluate, metrics pipeline") {
    awa::testing::TempDir dir("cli_pipeline");
    fs::path manifest = write_workspace(dir.path());

    RunResult train = run_cli("train --manifest " + manifest.string(), dir.path());
    REQUIRE(train.exit_code == 0);

    fs::path set0 = dir.path() / "out" / "sets" / "set_0";
    fs::path set1 = dir.path() / "out" / "sets" / "set_1";
    REQUIRE(fs::exists(set0 / "manifest.json"));
    REQUIRE(fs::exists(set1 / "manifest.json"));
    CHECK(fs::exists(set0 / "generator_0.bin"));
    CHECK(fs::exists(set0 / "perturbation_1.txt"));
    CHECK(fs::exists(set0 / "training_manifest.json"));

    SUBCASE("archives carry distinct seed fingerprints") {
        json m0 = json::parse(file_bytes(set0 / "manifest.json"));
        json m1 = json::parse(file_bytes(set1 / "manifest.json"));
        CHECK(m0.at("seed_fingerprint") != m1.at("seed_fingerprint"));
        CHECK(m0.at("num_classes") == 2);
        CHECK(m0.at("tool_version") == "0.1.0");
    }

    SUBCASE("transform writes a constraint-valid corpus and BWO tables") {
        RunResult tr = run_cli("transform --set " + set0.string() + " --corpus " +
                                   (dir.path() / "corpus").string() + " --out " +
                                   (dir.path() / "transformed").string(),
                               dir.path());
        REQUIRE(tr.exit_code == 0);
        CHECK(tr.out.find("BWO") != std::string::npos);
        CHECK(fs::exists(dir.path() / "transformed" / "bwo.tsv"));
        CHECK(fs::exists(dir.path() / "transformed" / "avg_trace.tsv"));

        TraceCorpus orig = load_corpus(dir.path() / "corpus", 16);
        TraceCorpus out = load_corpus(dir.path() / "transformed" / "corpus", 16);
        REQUIRE(out.size() == orig.size());
        for (size_t i = 0; i < out.size(); ++i)
            CHECK(check_constraints(orig.traces[i], out.traces[i]).ok());

        // the archive itself round-trips through the loader
        TransformerSet set = load_transformer_set(set0);
        CHECK(set.num_classes == 2);
        CHECK(set.transformers[0].cached_perturbation.has_value());
    }

    SUBCASE("evaluate emits a 2x2 matrix and is byte-stable across reruns") {
        RunResult ev = run_cli("evaluate --manifest " + manifest.string(), dir.path());
        REQUIRE(ev.exit_code == 0);
        fs::path report_dir = dir.path() / "out" / "report";
        REQUIRE(fs::exists(report_dir / "report.json"));
        json rep = json::parse(file_bytes(report_dir / "report.json"));
        CHECK(rep.at("num_sets") == 2);
        CHECK(rep.at("accuracy_user_by_adversary").size() == 2);
        CHECK(rep.at("accuracy_user_by_adversary")[0].size() == 2);
        CHECK(rep.at("scenario2_combination").size() == 2);

        fs::path first = dir.path() / "first_report";
        fs::copy(report_dir, first, fs::copy_options::recursive);
        RunResult again = run_cli("evaluate --manifest " + manifest.string(), dir.path());
        REQUIRE(again.exit_code == 0);
        CHECK(trees_identical(first, report_dir));
    }

    SUBCASE("metrics writes the intra-CD report") {
        RunResult me = run_cli("metrics --manifest " + manifest.string(), dir.path());
        REQUIRE(me.exit_code == 0);
        CHECK(fs::exists(dir.path() / "out" / "metrics" / "intra_cd.json"));
        CHECK(fs::exists(dir.path() / "out" / "metrics" / "intra_cd.tsv"));
    }

    SUBCASE("deleting an archive makes evaluate fail with a data error") {
        fs::remove_all(set1);
        RunResult ev = run_cli("evaluate --manifest " + manifest.string(), dir.path());
        CHECK(ev.exit_code == 3);
        CHECK(ev.err.find("missing transformer set") != std::string::npos);
    }
}

TEST_CASE("seed-file override changes the trained archives") {
    awa::testing::TempDir dir("cli_seedfile");
    fs::path manifest = write_workspace(dir.path());
    {
        std::ofstream s(dir.path() / "seeds.json");
        s << R"([{"param_init": 100, "data_order": 200, "pair_list": 300, "noise": 400}])";
    }
    RunResult r = run_cli("train --manifest " + manifest.string() + " --seed-file " +
                              (dir.path() / "seeds.json").string() + " --out " +
                              (dir.path() / "alt").string(),
                          dir.path());
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir.path() / "alt" / "sets" / "set_0" / "manifest.json"));
    CHECK_FALSE(fs::exists(dir.path() / "alt" / "sets" / "set_1"));
}

TEST_CASE("usage errors exit with code 2") {
    awa::testing::TempDir dir("cli_usage");
    RunResult r = run_cli("train", dir.path());
    CHECK(r.exit_code == 2);
    RunResult unknown = run_cli("frobnicate", dir.path());
    CHECK(unknown.exit_code == 2);
}
