#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace refscout {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

namespace detail {
inline LogLevel parse_log_level(std::string_view s, LogLevel fallback) {
    if (s == "error") return LogLevel::error;
    if (s == "warn") return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return fallback;
}

inline LogLevel& log_level_ref() {
    static LogLevel level = [] {
        const char* env = std::getenv("REFSCOUT_LOG");
        return env ? parse_log_level(env, LogLevel::warn) : LogLevel::warn;
    }();
    return level;
}
}  // namespace detail

inline LogLevel log_level() { return detail::log_level_ref(); }
inline void set_log_level(LogLevel level) { detail::log_level_ref() = level; }

inline void log_message(LogLevel level, std::string_view text) {
    if (level > log_level()) return;
    static constexpr const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << text << "\n";
}

inline void log_error(std::string_view text) { log_message(LogLevel::error, text); }
inline void log_warn(std::string_view text) { log_message(LogLevel::warn, text); }
inline void log_info(std::string_view text) { log_message(LogLevel::info, text); }
inline void log_debug(std::string_view text) { log_message(LogLevel::debug, text); }

}  // namespace refscout
