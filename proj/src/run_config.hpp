#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "l1atf/column.hpp"
#include "l1atf/dictionary.hpp"
#include "l1atf/solver.hpp"

namespace l1atf::cli {

struct PeriodRange {
    double min = 0;
    double max = 0;
    std::size_t count = 0;
};

/// Everything a `fit` run needs. Frequencies can be given as angular
/// frequencies, as periods (samples per cycle), or as an evenly spaced
/// period range; all three are merged into one ascending omega list.
struct RunConfig {
    std::string input;
    CsvOptions csv;

    std::vector<double> omega;
    std::vector<double> periods;
    std::optional<PeriodRange> period_range;
    BlockSet blocks = BlockSet::all();
    std::map<BlockKind, Bounds<double>> bounds;

    std::size_t lambda_count = 50;
    double lambda_min_ratio = 1e-4;
    std::vector<double> lambdas;
    std::vector<double> gammas{0.0, 0.5, 1.0, 2.0};

    double ebic_xi = 1.0;
    double tol = 1e-7;
    std::size_t max_cycles = 10000;
    bool center_signal = true;
    bool parallel_gamma = false;

    std::string output_dir;

    std::vector<double> resolved_omega() const;
    DictionarySpecd dictionary_spec(std::size_t n) const;
    PathGridd grid() const;
    SolverConfig solver() const;

    /// Checks everything that can be checked before the input is read.
    void validate() const;

    /// Manifest form: frequencies resolved to omega, output dir left out.
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// "kind=lower:upper" with empty or inf/-inf for an open end.
std::pair<BlockKind, Bounds<double>> parse_bound(const std::string& text);

BlockKind block_kind(const std::string& name);
BlockSet parse_blocks(const std::vector<std::string>& names);

} // namespace l1atf::cli
