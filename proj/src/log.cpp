#include "legodo/log.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace legodo {

namespace {

LogLevel parse_level(const char* raw) {
    if (raw == nullptr || *raw == '\0') {
        return LogLevel::WARN;
    }
    std::string s(raw);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s == "error" || s == "0") return LogLevel::ERROR;
    if (s == "warn" || s == "warning" || s == "1") return LogLevel::WARN;
    if (s == "info" || s == "2") return LogLevel::INFO;
    if (s == "debug" || s == "3") return LogLevel::DEBUG;
    return LogLevel::WARN;
}

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::ERROR: return "error";
        case LogLevel::WARN: return "warn";
        case LogLevel::INFO: return "info";
        case LogLevel::DEBUG: return "debug";
    }
    return "?";
}

}  // namespace

LogLevel log_threshold() {
    static const LogLevel level = parse_level(std::getenv("LEGODO_LOG"));
    return level;
}

bool log_enabled(LogLevel level) {
    return static_cast<int>(level) <= static_cast<int>(log_threshold());
}

void log_message(LogLevel level, const std::string& message) {
    if (!log_enabled(level)) {
        return;
    }
    std::fprintf(stderr, "[%s] %s\n", level_name(level), message.c_str());
}

}  // namespace legodo
