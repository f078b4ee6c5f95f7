#include "awa/log.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace awa::log {

static Level parse_level() {
    const char* env = std::getenv("AWA_LOG");
    if (!env) return Level::Warn;
    if (std::strcmp(env, "silent") == 0) return Level::Silent;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    if (std::strcmp(env, "warn") == 0) return Level::Warn;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    return Level::Warn;
}

Level level() {
    static const Level lvl = parse_level();
    return lvl;
}

void write(Level lvl, const std::string& msg) {
    if (lvl > level()) return;
    static const char* names[] = {"", "error", "warn", "info", "debug"};
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    std::fprintf(stderr, "[awa:%s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

} // namespace awa::log
