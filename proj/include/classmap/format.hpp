#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace classmap {

/// Fixed-point text with `decimals` digits, locale independent; -0 prints as 0.
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
    std::string out(buf, ec == std::errc() ? ptr : buf);
    if (!out.empty() && out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos)
        out.erase(0, 1);
    return out;
}

/// Shortest text that parses back to exactly `value`.
inline std::string format_roundtrip(double value) {
    if (std::isnan(value))
        return "NA";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

} // namespace classmap
