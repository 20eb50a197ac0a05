#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "l1atf/error.hpp"

using namespace l1atf;
using namespace l1atf::cli;

namespace {

struct FitFlags {
    std::string config_path;
    std::string input, value_column, time_column, header, delimiter;
    std::vector<double> omega, periods;
    double period_min = 0, period_max = 0;
    std::size_t period_count = 0;
    std::vector<std::string> blocks, bounds;
    std::size_t lambda_count = 0;
    double lambda_min_ratio = 0;
    std::vector<double> lambdas, gammas;
    double ebic_xi = 0, tol = 0;
    std::size_t max_cycles = 0;
    bool no_center = false, parallel_gamma = false;
    std::string output_dir;
};

// Starts from the --config manifest (or defaults) and applies the flags
// that were given explicitly.
RunConfig build_config(const FitFlags& f, const CLI::App& app)
{
    RunConfig c;
    if (!f.config_path.empty()) {
        try {
            c = RunConfig::from_json(nlohmann::json::parse(read_text(f.config_path)));
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("cannot parse config: ") + e.what());
        }
    }
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("input")) c.input = f.input;
    if (given("--value-column")) c.csv.value_column = f.value_column;
    if (given("--time-column")) c.csv.time_column = f.time_column;
    if (given("--header")) c.csv.header = parse_header_mode(f.header);
    if (given("--delimiter")) {
        if (f.delimiter.size() != 1) throw UsageError("delimiter must be one character");
        c.csv.delimiter = f.delimiter == "\\t" ? '\t' : f.delimiter[0];
    }
    // Any frequency flag replaces the frequency set from the config.
    if (given("--omega") || given("--period") || given("--period-min")) {
        c.omega = f.omega;
        c.periods = f.periods;
        c.period_range.reset();
    }
    if (given("--period-min") != given("--period-max") || given("--period-min") != given("--period-count"))
        throw UsageError("--period-min, --period-max and --period-count go together");
    if (given("--period-min")) c.period_range = PeriodRange{f.period_min, f.period_max, f.period_count};
    if (given("--blocks")) c.blocks = parse_blocks(f.blocks);
    if (given("--bound")) {
        c.bounds.clear();
        for (const auto& b : f.bounds) c.bounds.insert(parse_bound(b));
    }
    if (given("--lambda-count")) c.lambda_count = f.lambda_count;
    if (given("--lambda-min-ratio")) c.lambda_min_ratio = f.lambda_min_ratio;
    if (given("--lambda")) c.lambdas = f.lambdas;
    if (given("--gamma")) c.gammas = f.gammas;
    if (given("--ebic-xi")) c.ebic_xi = f.ebic_xi;
    if (given("--tol")) c.tol = f.tol;
    if (given("--max-cycles")) c.max_cycles = f.max_cycles;
    if (given("--no-center")) c.center_signal = false;
    if (given("--parallel-gamma")) c.parallel_gamma = true;
    c.output_dir = f.output_dir;
    return c;
}

int run(int argc, char** argv)
{
    CLI::App app{"Adaptive l1 trend filter: trend, level shifts, outliers and sinusoids from a noisy series"};
    app.require_subcommand(1);

    FitFlags ff;
    auto* fit = app.add_subcommand("fit", "Fit a series and write the decomposition");
    fit->add_option("input", ff.input, "Input CSV");
    fit->add_option("-o,--out", ff.output_dir, "Output directory")->required();
    fit->add_option("--config", ff.config_path, "Start from a run manifest");
    fit->add_option("--value-column", ff.value_column, "Value column name or 1-based index (default: last)");
    fit->add_option("--time-column", ff.time_column, "Timestamp column name or 1-based index");
    fit->add_option("--header", ff.header, "auto, yes or no");
    fit->add_option("--delimiter", ff.delimiter, "Field delimiter");
    fit->add_option("--omega", ff.omega, "Angular frequencies in (0, pi]")->delimiter(',');
    fit->add_option("--period", ff.periods, "Periods in samples")->delimiter(',');
    fit->add_option("--period-min", ff.period_min, "Shortest period of an even period grid");
    fit->add_option("--period-max", ff.period_max, "Longest period of an even period grid");
    fit->add_option("--period-count", ff.period_count, "Number of periods in the grid");
    fit->add_option("--blocks", ff.blocks, "Enabled blocks")->delimiter(',');
    fit->add_option("--bound", ff.bounds, "Coefficient bounds, kind=lower:upper");
    fit->add_option("--lambda-count", ff.lambda_count, "Lambdas per gamma");
    fit->add_option("--lambda-min-ratio", ff.lambda_min_ratio, "Smallest lambda as a fraction of lambda_max");
    fit->add_option("--lambda", ff.lambdas, "Explicit lambda grid")->delimiter(',');
    fit->add_option("--gamma", ff.gammas, "Adaptive weight exponents")->delimiter(',');
    fit->add_option("--ebic-xi", ff.ebic_xi, "EBIC xi in [0, 1]");
    fit->add_option("--tol", ff.tol, "Solver tolerance");
    fit->add_option("--max-cycles", ff.max_cycles, "Solver cycle limit per fit");
    fit->add_flag("--no-center", ff.no_center, "Fit without an intercept");
    fit->add_flag("--parallel-gamma", ff.parallel_gamma, "Run gamma paths on separate threads");

    SynthOptions so;
    auto* synth = app.add_subcommand("synth", "Write a synthetic series with known components");
    synth->add_option("preset", so.preset, "otdr, wind, step or custom")->capture_default_str();
    synth->add_option("-o,--out", so.output_dir, "Output directory")->required();
    synth->add_option("--seed", so.seed, "Noise seed")->capture_default_str();
    synth->add_option("-n", so.n, "Length (custom)")->capture_default_str();
    synth->add_option("--level", so.level, "Starting level (custom)")->capture_default_str();
    synth->add_option("--noise", so.noise, "Noise sigma (custom)")->capture_default_str();
    synth->add_option("--slope", so.slopes, "index:change (custom)");
    synth->add_option("--step", so.steps, "index:size, index is the first shifted sample (custom)");
    synth->add_option("--spike", so.spikes, "index:size (custom)");
    synth->add_option("--sinusoid", so.sinusoids, "period:a:b for a sin + b cos (custom)");

    std::string check_dir;
    double check_tol = 1e-6;
    auto* check = app.add_subcommand("check", "Check the optimality conditions of a finished fit");
    check->add_option("run", check_dir, "Directory written by fit")->required();
    check->add_option("--tol", check_tol, "Relative tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (fit->parsed()) {
        const RunConfig config = build_config(ff, *fit);
        const auto out = run_filter(config);
        const auto& best = out.selection.best_fit;
        std::printf("n=%zu p=%zu lambda=%.6g gamma=%g active=%zu events=%zu\n", out.n, out.p, best.lambda, best.gamma,
                    best.n_active, out.decomposition.events.size());
    } else if (synth->parsed()) {
        generate_fixture(so);
    } else if (check->parsed()) {
        const auto out = check_run(check_dir, check_tol);
        std::printf("active=%.3g inactive=%.3g bounded=%.3g threshold=%.3g %s\n", out.kkt.active, out.kkt.inactive,
                    out.kkt.bounded, out.threshold, out.passed ? "ok" : "VIOLATED");
        if (!out.passed) return 4;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const SelectionError& e) {
        std::cerr << "selection error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
