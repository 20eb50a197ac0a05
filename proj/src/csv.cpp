#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "l1atf/error.hpp"

namespace l1atf::cli {

std::string_view to_string(HeaderMode mode)
{
    switch (mode) {
    case HeaderMode::Auto: return "auto";
    case HeaderMode::Yes: return "yes";
    case HeaderMode::No: return "no";
    }
    return "auto";
}

HeaderMode parse_header_mode(std::string_view text)
{
    if (text == "auto") return HeaderMode::Auto;
    if (text == "yes") return HeaderMode::Yes;
    if (text == "no") return HeaderMode::No;
    throw UsageError("header must be auto, yes or no, got '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Resolves a name or 1-based index against the header (if any).
std::optional<std::size_t> resolve_column(const std::string& selector, const std::vector<std::string>& header,
                                          std::size_t width)
{
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec == std::errc() && ptr == selector.data() + selector.size()) {
        if (idx < 1 || idx > width)
            throw UsageError("column index " + selector + " out of range (1.." + std::to_string(width) + ")");
        return idx - 1;
    }
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == selector) return k;
    if (header.empty()) throw UsageError("column '" + selector + "' given by name but the input has no header");
    throw UsageError("no column named '" + selector + "'");
}

} // namespace

std::vector<std::string> split_fields(std::string_view line, char delimiter)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == delimiter && !quoted) {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

std::optional<double> parse_double(std::string_view text)
{
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc::result_out_of_range) return std::nullopt;
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        const auto l = lower(text);
        if (l == "nan" || l == "na") return std::numeric_limits<double>::quiet_NaN();
        return std::nullopt;
    }
    return v;
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Series read_series(std::istream& in, const CsvOptions& opts)
{
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        rows.emplace_back(lineno, split_fields(line, opts.delimiter));
    }
    if (rows.empty()) throw DataError("input is empty");

    const std::size_t width = rows.front().second.size();
    for (const auto& [ln, fields] : rows)
        if (fields.size() != width)
            throw DataError("line " + std::to_string(ln) + ": expected " + std::to_string(width) + " fields, found " +
                            std::to_string(fields.size()));

    Series s;
    // With an explicit header or a non-numeric first row, the first row names the columns.
    bool header = opts.header == HeaderMode::Yes;
    if (opts.header == HeaderMode::Auto) {
        for (const auto& f : rows.front().second)
            if (!parse_double(f)) header = true;
    }
    std::vector<std::string> names;
    if (header) names = rows.front().second;
    s.has_header = header;

    s.value_index = opts.value_column.empty() ? width - 1 : *resolve_column(opts.value_column, names, width);
    if (!opts.time_column.empty()) {
        s.time_index = resolve_column(opts.time_column, names, width);
        if (*s.time_index == s.value_index) throw UsageError("time and value columns are the same");
        s.timestamps.emplace();
    }

    bool any_finite = false;
    std::optional<std::size_t> first_bad;
    for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
        const auto& [ln, fields] = rows[r];
        const auto& cell = fields[s.value_index];
        const auto v = parse_double(cell);
        if (!v) {
            if (trim(cell).empty()) {
                if (!first_bad) first_bad = ln;
                s.values.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            throw DataError("line " + std::to_string(ln) + ": cannot parse '" + cell + "' as a number");
        }
        if (std::isfinite(*v)) any_finite = true;
        else if (!first_bad) first_bad = ln;
        s.values.push_back(*v);
        if (s.timestamps) s.timestamps->push_back(fields[*s.time_index]);
    }
    if (s.values.empty()) throw DataError("input has a header but no data rows");
    if (!any_finite) throw DataError("the value column contains no finite samples");
    if (first_bad) throw DataError("line " + std::to_string(*first_bad) + ": missing or non-finite sample");
    return s;
}

Series read_series_file(const std::string& path, const CsvOptions& opts)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return read_series(in, opts);
}

} // namespace l1atf::cli
