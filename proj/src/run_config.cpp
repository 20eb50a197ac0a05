#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "l1atf/error.hpp"

namespace l1atf::cli {

using nlohmann::json;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// JSON has no infinity; an open bound is written as null.
json bound_end(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_bound_end(const json& j, double open)
{
    if (j.is_null()) return open;
    return j.get<double>();
}

std::vector<double> period_range_values(const PeriodRange& r)
{
    std::vector<double> out;
    if (r.count == 1) return {r.min};
    for (std::size_t k = 0; k < r.count; ++k)
        out.push_back(r.min + (r.max - r.min) * double(k) / double(r.count - 1));
    return out;
}

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

} // namespace

BlockKind block_kind(const std::string& name)
{
    if (auto k = parse_block_kind(name)) return *k;
    throw UsageError("unknown block '" + name + "' (slope, step, spike, sine, cosine)");
}

std::pair<BlockKind, Bounds<double>> parse_bound(const std::string& text)
{
    const auto eq = text.find('=');
    const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
        throw UsageError("bound must look like kind=lower:upper, got '" + text + "'");
    const BlockKind kind = block_kind(text.substr(0, eq));
    auto end = [&](const std::string& s, double open) {
        if (s.empty()) return open;
        const auto v = parse_double(s);
        if (!v || std::isnan(*v)) throw UsageError("bad bound value '" + s + "'");
        return *v;
    };
    Bounds<double> b;
    b.lower = end(text.substr(eq + 1, colon - eq - 1), -inf);
    b.upper = end(text.substr(colon + 1), inf);
    return {kind, b};
}

BlockSet parse_blocks(const std::vector<std::string>& names)
{
    BlockSet set = BlockSet::none();
    for (const auto& n : names) set.insert(block_kind(n));
    return set;
}

std::vector<double> RunConfig::resolved_omega() const
{
    std::vector<double> out = omega;
    for (double p : periods) {
        if (!(p >= 2)) throw UsageError("periods must be >= 2 samples");
        out.push_back(2 * std::numbers::pi / p);
    }
    if (period_range) {
        const auto& r = *period_range;
        if (r.count < 1) throw UsageError("period count must be >= 1");
        if (!(r.min >= 2) || !(r.max >= r.min)) throw UsageError("period range needs 2 <= min <= max");
        for (double p : period_range_values(r)) out.push_back(2 * std::numbers::pi / p);
    }
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw UsageError("duplicate frequencies");
    return out;
}

DictionarySpecd RunConfig::dictionary_spec(std::size_t n) const
{
    DictionarySpecd spec;
    spec.n = n;
    spec.omega = resolved_omega();
    spec.enabled = blocks;
    spec.bounds = bounds;
    spec.validate();
    return spec;
}

PathGridd RunConfig::grid() const
{
    PathGridd g;
    g.lambdas = lambdas;
    g.lambda_count = lambda_count;
    g.lambda_min_ratio = lambda_min_ratio;
    g.gammas = gammas;
    return g;
}

SolverConfig RunConfig::solver() const
{
    SolverConfig s;
    s.tol = tol;
    s.max_cycles = max_cycles;
    s.center_signal = center_signal;
    s.parallel_gamma = parallel_gamma;
    return s;
}

void RunConfig::validate() const
{
    if (input.empty()) throw UsageError("no input file given");
    grid().validate();
    solver().validate();
    if (!(ebic_xi >= 0 && ebic_xi <= 1)) throw UsageError("ebic xi must lie in [0, 1]");
    // checks omega range, bounds and blocks with a placeholder length
    dictionary_spec(3);
}

json RunConfig::to_json() const
{
    json blocks_json = json::array();
    for (BlockKind k : all_block_kinds)
        if (blocks.contains(k)) blocks_json.push_back(std::string(to_string(k)));
    json bounds_json = json::object();
    for (const auto& [k, b] : bounds) bounds_json[std::string(to_string(k))] = {bound_end(b.lower), bound_end(b.upper)};

    json j;
    j["input"] = {
        {"path", input},
        {"value_column", csv.value_column},
        {"time_column", csv.time_column},
        {"header", std::string(to_string(csv.header))},
        {"delimiter", std::string(1, csv.delimiter)},
    };
    j["dictionary"] = {{"blocks", blocks_json}, {"omega", resolved_omega()}, {"bounds", bounds_json}};
    j["grid"] = {
        {"lambda_count", lambda_count},
        {"lambda_min_ratio", lambda_min_ratio},
        {"lambdas", lambdas},
        {"gammas", gammas},
    };
    j["selection"] = {{"ebic_xi", ebic_xi}};
    j["solver"] = {
        {"tol", tol},
        {"max_cycles", max_cycles},
        {"center_signal", center_signal},
        {"parallel_gamma", parallel_gamma},
    };
    return j;
}

RunConfig RunConfig::from_json(const json& j)
{
    try {
        RunConfig c;
        const json& in = j.at("input");
        c.input = in.at("path").get<std::string>();
        c.csv.value_column = get_or<std::string>(in, "value_column", "");
        c.csv.time_column = get_or<std::string>(in, "time_column", "");
        c.csv.header = parse_header_mode(get_or<std::string>(in, "header", "auto"));
        const auto delim = get_or<std::string>(in, "delimiter", ",");
        if (delim.size() != 1) throw UsageError("delimiter must be one character");
        c.csv.delimiter = delim[0];

        if (j.contains("dictionary")) {
            const json& d = j.at("dictionary");
            if (d.contains("blocks")) c.blocks = parse_blocks(d.at("blocks").get<std::vector<std::string>>());
            c.omega = get_or<std::vector<double>>(d, "omega", {});
            if (d.contains("bounds"))
                for (const auto& [name, pair] : d.at("bounds").items()) {
                    if (!pair.is_array() || pair.size() != 2) throw UsageError("bounds entries are [lower, upper]");
                    c.bounds[block_kind(name)] = {read_bound_end(pair[0], -inf), read_bound_end(pair[1], inf)};
                }
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            c.lambda_count = get_or<std::size_t>(g, "lambda_count", c.lambda_count);
            c.lambda_min_ratio = get_or<double>(g, "lambda_min_ratio", c.lambda_min_ratio);
            c.lambdas = get_or<std::vector<double>>(g, "lambdas", {});
            c.gammas = get_or<std::vector<double>>(g, "gammas", c.gammas);
        }
        if (j.contains("selection")) c.ebic_xi = get_or<double>(j.at("selection"), "ebic_xi", c.ebic_xi);
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            c.tol = get_or<double>(s, "tol", c.tol);
            c.max_cycles = get_or<std::size_t>(s, "max_cycles", c.max_cycles);
            c.center_signal = get_or<bool>(s, "center_signal", c.center_signal);
            c.parallel_gamma = get_or<bool>(s, "parallel_gamma", c.parallel_gamma);
        }
        return c;
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad config: ") + e.what());
    }
}

} // namespace l1atf::cli
