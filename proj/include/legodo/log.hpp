#pragma once

#include <string>

namespace legodo {

enum class LogLevel { ERROR = 0, WARN = 1, INFO = 2, DEBUG = 3 };

/// Threshold parsed once from LEGODO_LOG (error|warn|info|debug or 0..3);
/// defaults to warn.
LogLevel log_threshold();

bool log_enabled(LogLevel level);

/// Writes "[level] message" to stderr when the level passes the threshold.
void log_message(LogLevel level, const std::string& message);

}  // namespace legodo
