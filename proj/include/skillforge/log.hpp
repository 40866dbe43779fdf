#pragma once

#include <string>

namespace skillforge::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold comes from SKILLFORGE_LOG (error|warn|info|debug), default warn.
Level threshold();

void write(Level level, const std::string& message);

inline void error(const std::string& message) { write(Level::Error, message); }
inline void warn(const std::string& message) { write(Level::Warn, message); }
inline void info(const std::string& message) { write(Level::Info, message); }
inline void debug(const std::string& message) { write(Level::Debug, message); }

} // namespace skillforge::log
