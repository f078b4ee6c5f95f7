#pragma once

#include <filesystem>

#include "awa/network.hpp"

namespace awa {

/// Self-describing model container: magic + JSON architecture manifest,
/// followed by the flat parameter array and the batch-norm running
/// statistics, both as little-endian 32-bit floats.
void save_model(const NetworkModel& model, const std::filesystem::path& file);

NetworkModel load_model(const std::filesystem::path& file);

} // namespace awa
