#pragma once

#include <filesystem>
#include <string>

#include "awa/harness.hpp"
#include "awa/manifest.hpp"

namespace awa {

/// Writers for the structured-text reports and the plot-ready delimited
/// tables. All output is deterministic: fixed number formatting, no
/// wall-clock content.

void write_training_log(const TrainingLog& log, const TrainConfig& config,
                        const std::string& manifest_hash, const std::filesystem::path& file);

void write_experiment_report(const ExperimentReport& report, const std::string& manifest_hash,
                             const std::filesystem::path& dir);

void write_intra_cd_report(const IntraCDReport& report, const std::string& manifest_hash,
                           const std::filesystem::path& dir);

/// Per-class BWO table: `class<TAB>bwo_percent`.
void write_bwo_table(const std::vector<double>& per_class, const std::string& manifest_hash,
                     const std::filesystem::path& file);

/// Average trace of each class before and after transformation:
/// `class<TAB>burst_index<TAB>original<TAB>transformed`.
void write_average_trace_table(const TraceCorpus& original, const TraceCorpus& transformed,
                               const std::string& manifest_hash,
                               const std::filesystem::path& file);

} // namespace awa
