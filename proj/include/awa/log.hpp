#pragma once

#include <cstdio>
#include <string>

namespace awa::log {

enum class Level { Silent = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

/// Current level, initialized once from the AWA_LOG environment variable
/// (silent|error|warn|info|debug). Defaults to warn.
Level level();

void write(Level lvl, const std::string& msg);

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

} // namespace awa::log
