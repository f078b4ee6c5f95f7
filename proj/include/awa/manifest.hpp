#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "awa/harness.hpp"
#include "awa/trainer.hpp"

namespace awa {

/// Experiment description file: corpus, split, training and scenario
/// configuration, plus one seed bundle per transformer set.
struct ExperimentManifest {
    std::filesystem::path corpus;
    int trace_length = 2000;
    TransformMode mode = TransformMode::Universal;
    SplitSpec split;
    uint64_t split_seed = 0;
    TrainConfig train;
    std::vector<SeedBundle> seeds;
    ScenarioConfig scenario;
    std::filesystem::path output;
    double kernel_bandwidth = 0.0; // <= 0: median heuristic

    /// 64-bit digest of the manifest file bytes, carried into every output.
    std::string hash;

    int num_sets() const { return static_cast<int>(seeds.size()); }
};

/// Parses and validates a manifest file. Referenced paths are checked for
/// existence; errors carry the offending key. Relative paths resolve against
/// the manifest's directory.
ExperimentManifest load_manifest(const std::filesystem::path& file);

/// Replaces the manifest's seed bundles with the contents of a seed file
/// (JSON array of {param_init, data_order, pair_list, noise}).
void apply_seed_file(ExperimentManifest& manifest, const std::filesystem::path& seed_file);

nlohmann::json train_config_json(const TrainConfig& c);
nlohmann::json seed_bundle_json(const SeedBundle& s);

} // namespace awa
