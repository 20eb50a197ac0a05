#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace l1atf::cli {

enum class HeaderMode { Auto, Yes, No };

std::string_view to_string(HeaderMode mode);
HeaderMode parse_header_mode(std::string_view text);

struct CsvOptions {
    // Column name or 1-based index; empty selects the last column.
    std::string value_column;
    // Column name or 1-based index; empty means no timestamps.
    std::string time_column;
    HeaderMode header = HeaderMode::Auto;
    char delimiter = ',';
};

struct Series {
    std::vector<double> values;
    std::optional<std::vector<std::string>> timestamps;
    bool has_header = false;
    std::size_t value_index = 0;  // 0-based
    std::optional<std::size_t> time_index;
};

/// Reads one numeric column. Empty cells and NaN are rejected with their
/// line number; a column with no finite value at all is reported as such.
Series read_series(std::istream& in, const CsvOptions& opts);
Series read_series_file(const std::string& path, const CsvOptions& opts);

std::vector<std::string> split_fields(std::string_view line, char delimiter);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view text);

} // namespace l1atf::cli
