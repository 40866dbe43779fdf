#include "skillforge/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace skillforge::log {

namespace {

Level parse_level() {
    const char* env = std::getenv("SKILLFORGE_LOG");
    if (!env)
        return Level::Warn;
    std::string value(env);
    if (value == "error") return Level::Error;
    if (value == "warn") return Level::Warn;
    if (value == "info") return Level::Info;
    if (value == "debug") return Level::Debug;
    return Level::Warn;
}

const char* tag(Level level) {
    switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
    }
    return "?";
}

std::mutex stderr_mutex;

} // namespace

Level threshold() {
    static Level level = parse_level();
    return level;
}

void write(Level level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(threshold()))
        return;
    std::lock_guard lock(stderr_mutex);
    std::cerr << "[skillforge:" << tag(level) << "] " << message << "\n";
}

} // namespace skillforge::log
