#include "awa/archive.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "awa/model_io.hpp"
#include "awa/version.hpp"

namespace awa {

namespace fs = std::filesystem;
using json = nlohmann::json;

void save_transformer_set(const TransformerSet& set, const fs::path& dir,
                          const json& creation) {
    fs::create_directories(dir);

    json pairs = json::array();
    for (const auto& [a, b] : set.pair_list) pairs.push_back({a, b});
    json manifest = {
        {"tool_version", kToolVersion},
        {"num_classes", set.num_classes},
        {"trace_length", set.trace_length},
        {"mode", to_string(set.mode)},
        {"pair_list", pairs},
        {"seed_fingerprint", hex64(set.seed_fingerprint)},
        // Within each pair the first-listed website's transformer carries
        // discriminator label 1.
        {"label_convention", "pair[0] -> label 1, pair[1] -> label 0"},
        {"creation", creation},
    };
    {
        std::ofstream out(dir / "manifest.json");
        if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
        out << manifest.dump(2) << '\n';
    }

    for (const TransformerSpec& t : set.transformers) {
        std::string id = std::to_string(t.website_id);
        save_model(t.generator, dir / ("generator_" + id + ".bin"));
        if (t.cached_perturbation) {
            std::ofstream out(dir / ("perturbation_" + id + ".txt"));
            if (!out) throw IoError("cannot write perturbation file for website " + id);
            const Eigen::VectorXd& p = *t.cached_perturbation;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                if (i > 0) out << ' ';
                out << static_cast<long long>(p(i));
            }
            out << '\n';
        }
    }
}

TransformerSet load_transformer_set(const fs::path& dir) {
    fs::path manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("transformer-set archive not found: " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw IoError(manifest_path.string() + ": " + e.what());
    }

    TransformerSet set;
    set.num_classes = manifest.at("num_classes").get<int>();
    set.trace_length = manifest.at("trace_length").get<int>();
    set.mode = transform_mode_from_string(manifest.at("mode").get<std::string>());
    set.seed_fingerprint = std::stoull(manifest.at("seed_fingerprint").get<std::string>(),
                                       nullptr, 16);
    for (const auto& p : manifest.at("pair_list"))
        set.pair_list.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());

    for (int w = 0; w < set.num_classes; ++w) {
        std::string id = std::to_string(w);
        TransformerSpec spec{w, set.mode, load_model(dir / ("generator_" + id + ".bin")),
                             std::nullopt, 0};
        fs::path pert = dir / ("perturbation_" + id + ".txt");
        if (fs::exists(pert)) {
            if (set.mode == TransformMode::NonUniversal)
                throw IoError("non-universal archive carries a cached perturbation for website " + id);
            std::ifstream pin(pert);
            std::vector<double> vals;
            double v = 0.0;
            while (pin >> v) {
                if (v < 0.0) throw IoError("negative cached perturbation entry for website " + id);
                vals.push_back(v);
            }
            Eigen::VectorXd cp(static_cast<Eigen::Index>(vals.size()));
            for (size_t i = 0; i < vals.size(); ++i) cp(static_cast<Eigen::Index>(i)) = vals[i];
            spec.cached_perturbation = std::move(cp);
        } else if (set.mode == TransformMode::Universal) {
            throw IoError("universal archive lacks perturbation file for website " + id);
        }
        set.transformers.push_back(std::move(spec));
    }
    return set;
}

} // namespace awa
