#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "l1atf/oracle.hpp"
#include "l1atf/selection.hpp"
#include "l1atf/signals.hpp"

namespace l1atf::cli {

struct FitOutcome {
    std::size_t n = 0;
    std::size_t p = 0;
    SelectionReport<double> selection;
    Decomposition<double> decomposition;
};

/// Reads the input, fits the grid, selects by EBIC and writes
/// decomposition.csv, events.csv, selection.csv, coefficients.csv and
/// manifest.json into `config.output_dir`.
FitOutcome run_filter(const RunConfig& config);

struct SynthOptions {
    std::string preset = "custom";  // otdr, wind, step or custom
    std::string output_dir;
    std::uint64_t seed = 0;
    // Only used by the custom preset; the others fix these.
    std::size_t n = 200;
    double level = 0;
    double noise = 0.1;
    std::vector<std::string> slopes;     // index:magnitude
    std::vector<std::string> steps;      // index:magnitude
    std::vector<std::string> spikes;     // index:magnitude
    std::vector<std::string> sinusoids;  // period:a:b
};

SyntheticSpec<double> synth_spec(const SynthOptions& opts);

/// Writes signal.csv (t, y), truth.csv (t, clean, x, w, u, s, baseline) and
/// events.csv for the planted components.
void generate_fixture(const SynthOptions& opts);

struct CheckOutcome {
    KktReport<double> kkt;
    double lambda = 0;
    double threshold = 0;
    bool passed = false;
};

/// Rebuilds the problem from a run's manifest and checks the stored
/// coefficients. The threshold is tol * (1 + lambda) * max(1, |y|_inf).
CheckOutcome check_run(const std::filesystem::path& run_dir, double tol = 1e-6);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace l1atf::cli
