#pragma once

#include <filesystem>

#include <nlohmann/json_fwd.hpp>

#include "awa/transformer.hpp"

namespace awa {

/// Transformer-set archive: a plain directory holding manifest.json, one
/// serialized generator per website, and (universal mode) one plain-text
/// integer perturbation vector per website.
void save_transformer_set(const TransformerSet& set, const std::filesystem::path& dir,
                          const nlohmann::json& creation);

TransformerSet load_transformer_set(const std::filesystem::path& dir);

} // namespace awa
