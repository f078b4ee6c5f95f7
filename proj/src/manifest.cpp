#include "awa/manifest.hpp"

#include <fstream>
#include <sstream>

namespace awa {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json parse_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        // nlohmann reports byte offsets; surface the line number instead.
        size_t line = 1;
        std::string text = buf.str();
        for (size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError(file.string() + ":" + std::to_string(line) + ": " + e.what());
    }
}

SeedBundle parse_seed_bundle(const json& j) {
    SeedBundle s;
    s.param_init = j.at("param_init").get<uint64_t>();
    s.data_order = j.at("data_order").get<uint64_t>();
    s.pair_list = j.at("pair_list").get<uint64_t>();
    s.noise = j.at("noise").get<uint64_t>();
    return s;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

TrainConfig parse_train_config(const json& j) {
    TrainConfig c;
    read_if(j, "iterations", c.iterations);
    read_if(j, "disc_steps", c.disc_steps);
    read_if(j, "gen_steps", c.gen_steps);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "overhead_gate", c.overhead_gate);
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        read_if(w, "alpha", c.weights.alpha);
        read_if(w, "beta", c.weights.beta);
        read_if(w, "gamma", c.weights.gamma);
        read_if(w, "tau_low", c.weights.tau_low);
        read_if(w, "tau_high", c.weights.tau_high);
    }
    read_if(j, "gen_lr", c.gen_lr);
    read_if(j, "disc_lr", c.disc_lr);
    read_if(j, "ac_lr", c.ac_lr);
    read_if(j, "ac_epochs", c.ac_epochs);
    read_if(j, "ac_batch", c.ac_batch);
    return c;
}

} // namespace

ExperimentManifest load_manifest(const fs::path& file) {
    json j = parse_json_file(file);

    ExperimentManifest m;
    {
        std::ifstream in(file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string bytes = buf.str();
        m.hash = hex64(hash_bytes(bytes.data(), bytes.size()));
    }

    try {
        fs::path base = file.parent_path();
        auto resolve = [&](const std::string& p) {
            fs::path path(p);
            return path.is_absolute() ? path : base / path;
        };

        m.corpus = resolve(j.at("corpus").get<std::string>());
        read_if(j, "trace_length", m.trace_length);
        if (j.contains("mode"))
            m.mode = transform_mode_from_string(j.at("mode").get<std::string>());

        const json& sp = j.at("split");
        m.split.awa_train = sp.at("awa_train").get<int>();
        m.split.adversary_train = sp.at("adversary_train").get<int>();
        m.split.adversary_val = sp.at("adversary_val").get<int>();
        m.split.target_user = sp.at("target_user").get<int>();
        read_if(sp, "seed", m.split_seed);

        if (j.contains("train")) m.train = parse_train_config(j.at("train"));

        for (const auto& s : j.at("seeds")) m.seeds.push_back(parse_seed_bundle(s));
        if (m.seeds.empty()) throw ConfigError("manifest needs at least one seed bundle");

        if (j.contains("scenario")) {
            const json& sc = j.at("scenario");
            read_if(sc, "classifier", m.scenario.classifier);
            read_if(sc, "epochs", m.scenario.epochs);
            read_if(sc, "batch_size", m.scenario.batch_size);
            read_if(sc, "lr", m.scenario.learning_rate);
            read_if(sc, "seed", m.scenario.seed);
        }

        m.output = resolve(j.value("output", "out"));
        read_if(j, "kernel_bandwidth", m.kernel_bandwidth);
    } catch (const json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }

    if (m.trace_length < 4 || m.trace_length % 4 != 0)
        throw ConfigError("trace_length must be a positive multiple of 4");
    m.train.validate();
    m.scenario.validate();
    if (!fs::exists(m.corpus))
        throw ConfigError("manifest corpus path does not exist: " + m.corpus.string());
    return m;
}

void apply_seed_file(ExperimentManifest& manifest, const fs::path& seed_file) {
    json j = parse_json_file(seed_file);
    if (!j.is_array() || j.empty())
        throw ConfigError(seed_file.string() + ": expected a nonempty JSON array of seed bundles");
    manifest.seeds.clear();
    try {
        for (const auto& s : j) manifest.seeds.push_back(parse_seed_bundle(s));
    } catch (const json::exception& e) {
        throw ConfigError(seed_file.string() + ": " + e.what());
    }
}

json train_config_json(const TrainConfig& c) {
    return {{"iterations", c.iterations},
            {"disc_steps", c.disc_steps},
            {"gen_steps", c.gen_steps},
            {"batch_size", c.batch_size},
            {"overhead_gate", c.overhead_gate},
            {"weights",
             {{"alpha", c.weights.alpha},
              {"beta", c.weights.beta},
              {"gamma", c.weights.gamma},
              {"tau_low", c.weights.tau_low},
              {"tau_high", c.weights.tau_high}}},
            {"gen_lr", c.gen_lr},
            {"disc_lr", c.disc_lr},
            {"ac_lr", c.ac_lr},
            {"ac_epochs", c.ac_epochs},
            {"ac_batch", c.ac_batch}};
}

json seed_bundle_json(const SeedBundle& s) {
    return {{"param_init", s.param_init},
            {"data_order", s.data_order},
            {"pair_list", s.pair_list},
            {"noise", s.noise},
            {"fingerprint", hex64(s.fingerprint())}};
}

} // namespace awa
