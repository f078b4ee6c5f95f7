#pragma once

namespace awa {

inline constexpr const char* kToolName = "awa";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace awa
