#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace classmap {

/// Header plus string cells, exactly as read from CSV. Empty cells and the
/// literal `NA` denote missing values.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t size() const { return rows.size(); }

    std::optional<std::size_t> column_index(std::string_view name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name)
                return j;
        return std::nullopt;
    }

    /// Subset of rows, header preserved.
    Table slice(std::size_t first, std::size_t count) const {
        Table out{header, {}};
        out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(first),
                        rows.begin() + static_cast<std::ptrdiff_t>(first + count));
        return out;
    }
};

inline bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA"; }

/// Locale-independent parse of a finite decimal number; nullopt on any
/// trailing garbage.
inline std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

} // namespace classmap
