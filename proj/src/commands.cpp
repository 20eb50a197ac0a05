#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "l1atf/error.hpp"

namespace l1atf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

void make_dir(const fs::path& dir)
{
    if (dir.empty()) throw UsageError("no output directory given");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
}

std::string join(std::initializer_list<std::string> fields)
{
    std::string line;
    for (const auto& f : fields) {
        if (!line.empty()) line += ',';
        line += f;
    }
    return line + '\n';
}

std::string fmt(double v) { return format_double(v); }

std::string events_csv(const std::vector<Event<double>>& events)
{
    std::string out = "kind,location,magnitude\n";
    for (const auto& e : events) out += join({std::string(to_string(e.kind)), fmt(e.location), fmt(e.magnitude)});
    return out;
}

std::string decomposition_csv(const Signal<double>& y, const Decomposition<double>& d)
{
    const bool ts = y.timestamps.has_value();
    std::string out = ts ? "t,timestamp,y,fitted,x,w,u,s,baseline\n" : "t,y,fitted,x,w,u,s,baseline\n";
    for (Eigen::Index t = 0; t < y.values.size(); ++t) {
        std::string line = std::to_string(t) + ',';
        if (ts) line += (*y.timestamps)[static_cast<std::size_t>(t)] + ',';
        line += join({fmt(y.values[t]), fmt(d.fitted[t]), fmt(d.x[t]), fmt(d.w[t]), fmt(d.u[t]), fmt(d.s[t]),
                      fmt(d.baseline)});
        out += line;
    }
    return out;
}

std::string selection_csv(const std::vector<FitResult<double>>& fits, const SelectionReport<double>& rep)
{
    std::string out = "gamma,lambda,n_active,rss,converged,cycles,ebic,selected\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto& f = fits[i];
        out += join({fmt(f.gamma), fmt(f.lambda), std::to_string(f.n_active), fmt(f.rss), f.converged ? "1" : "0",
                     std::to_string(f.cycles_used), fmt(rep.scores[i]), i == rep.best_index ? "1" : "0"});
    }
    return out;
}

std::string coefficients_csv(const SparseCoefficients<double>& c)
{
    std::string out = "column,kind,index,value\n";
    for (const auto& [id, v] : c.entries)
        out += join({to_string(id), std::string(to_string(id.kind)), std::to_string(id.index), fmt(v)});
    return out;
}

SparseCoefficients<double> parse_coefficients(const std::string& text, const Dictionary<double>& dict)
{
    SparseCoefficients<double> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (++lineno == 1 || line.empty()) continue;
        const auto f = split_fields(line, ',');
        const auto v = f.size() == 4 ? parse_double(f[3]) : std::nullopt;
        std::size_t idx = 0;
        if (!v || !std::isfinite(*v) || !(std::istringstream(f[2]) >> idx))
            throw DataError("coefficients.csv line " + std::to_string(lineno) + ": malformed row");
        const auto kind = parse_block_kind(f[1]);
        if (!kind) throw DataError("coefficients.csv line " + std::to_string(lineno) + ": unknown kind '" + f[1] + "'");
        const ColumnId id{*kind, idx};
        if (!dict.contains(id))
            throw DataError("coefficients.csv line " + std::to_string(lineno) + ": " + to_string(id) +
                            " is not in the dictionary");
        out.entries[id] = *v;
    }
    return out;
}

// Resolves the CSV selectors so the manifest does not depend on auto-detection.
RunConfig resolved(const RunConfig& config, const Series& series)
{
    RunConfig r = config;
    r.input = fs::absolute(config.input).lexically_normal().string();
    r.csv.header = series.has_header ? HeaderMode::Yes : HeaderMode::No;
    r.csv.value_column = std::to_string(series.value_index + 1);
    if (series.time_index) r.csv.time_column = std::to_string(*series.time_index + 1);
    r.omega = config.resolved_omega();
    r.periods.clear();
    r.period_range.reset();
    return r;
}

std::pair<std::size_t, double> parse_component(const std::string& text)
{
    const auto colon = text.find(':');
    std::size_t idx = 0;
    const auto mag = colon == std::string::npos ? std::nullopt : parse_double(text.substr(colon + 1));
    if (!mag || !std::isfinite(*mag) || !(std::istringstream(text.substr(0, colon)) >> idx))
        throw UsageError("expected index:magnitude, got '" + text + "'");
    return {idx, *mag};
}

PlantedSinusoid<double> parse_sinusoid(const std::string& text)
{
    const auto f = split_fields(text, ':');
    if (f.size() != 3) throw UsageError("expected period:a:b, got '" + text + "'");
    const auto period = parse_double(f[0]), a = parse_double(f[1]), b = parse_double(f[2]);
    if (!period || !a || !b || !(*period >= 2) || !std::isfinite(*a) || !std::isfinite(*b))
        throw UsageError("bad sinusoid '" + text + "'");
    return {2 * std::numbers::pi / *period, *a, *b};
}

} // namespace

FitOutcome run_filter(const RunConfig& config)
{
    config.validate();
    const Series series = read_series_file(config.input, config.csv);
    const Signal<double> signal(Eigen::Map<const Vector<double>>(series.values.data(), Eigen::Index(series.values.size())),
                                series.timestamps);
    signal.validate();

    const RunConfig manifest_config = resolved(config, series);
    const Dictionary<double> dict(config.dictionary_spec(signal.size()));
    const Problem<double> problem(dict, signal, config.center_signal);
    const auto fits = fit_path(problem, config.grid(), config.solver());

    FitOutcome out;
    out.n = signal.size();
    out.p = dict.size();
    out.selection = select_model(fits, out.n, out.p, config.ebic_xi);
    out.decomposition = reconstruct(dict, out.selection.best_fit);

    json manifest = manifest_config.to_json();
    manifest["format"] = "l1atf-run";
    manifest["version"] = 1;
    json lambda_max_by_gamma = json::array();
    for (double g : config.gammas) lambda_max_by_gamma.push_back({g, lambda_max(problem, make_weights(problem, g))});
    const auto& best = out.selection.best_fit;
    manifest["result"] = {
        {"n", out.n},
        {"p", out.p},
        {"fits", fits.size()},
        {"lambda_max", lambda_max_by_gamma},
        {"selected_index", out.selection.best_index},
        {"selected_lambda", best.lambda},
        {"selected_gamma", best.gamma},
        {"selected_ebic", out.selection.scores[out.selection.best_index]},
        {"n_active", best.n_active},
        {"baseline", best.baseline},
    };

    const fs::path dir(config.output_dir);
    make_dir(dir);
    write_text(dir / "decomposition.csv", decomposition_csv(signal, out.decomposition));
    write_text(dir / "events.csv", events_csv(out.decomposition.events));
    write_text(dir / "selection.csv", selection_csv(fits, out.selection));
    write_text(dir / "coefficients.csv", coefficients_csv(best.coefficients));
    write_text(dir / "manifest.json", manifest.dump(2) + '\n');
    return out;
}

SyntheticSpec<double> synth_spec(const SynthOptions& opts)
{
    SyntheticSpec<double> s;
    s.rng_seed = opts.seed;
    if (opts.preset == "otdr") {
        s.n = 500;
        s.level = 20;
        s.slopes = {{0, -0.02}};
        s.steps = {{150, -1.5}, {320, -0.8}};
        s.spikes = {{250, 2.0}};
        s.noise_sigma = 0.05;
    } else if (opts.preset == "wind") {
        s.n = 336;
        s.level = 3;
        s.steps = {{150, -2.5}, {190, 2.5}};
        s.sinusoids = {{2 * std::numbers::pi / 24, 0.8, 0.6}, {2 * std::numbers::pi / 12, 0.2, -0.1}};
        s.noise_sigma = 0.3;
    } else if (opts.preset == "step") {
        s.n = 200;
        s.steps = {{100, 2.0}};
        s.noise_sigma = 0.1;
    } else if (opts.preset == "custom") {
        s.n = opts.n;
        s.level = opts.level;
        s.noise_sigma = opts.noise;
        for (const auto& t : opts.slopes) s.slopes.push_back({parse_component(t).first, parse_component(t).second});
        for (const auto& t : opts.steps) s.steps.push_back({parse_component(t).first, parse_component(t).second});
        for (const auto& t : opts.spikes) s.spikes.push_back({parse_component(t).first, parse_component(t).second});
        for (const auto& t : opts.sinusoids) s.sinusoids.push_back(parse_sinusoid(t));
    } else {
        throw UsageError("unknown preset '" + opts.preset + "' (otdr, wind, step, custom)");
    }
    s.validate();
    return s;
}

void generate_fixture(const SynthOptions& opts)
{
    const auto [y, truth] = generate(synth_spec(opts));
    const fs::path dir(opts.output_dir);
    make_dir(dir);

    std::string signal = "t,y\n";
    std::string clean = "t,clean,x,w,u,s,baseline\n";
    for (Eigen::Index t = 0; t < y.values.size(); ++t) {
        signal += std::to_string(t) + ',' + fmt(y.values[t]) + '\n';
        clean += std::to_string(t) + ',' +
                 join({fmt(truth.fitted[t]), fmt(truth.x[t]), fmt(truth.w[t]), fmt(truth.u[t]), fmt(truth.s[t]),
                       fmt(truth.baseline)});
    }
    write_text(dir / "signal.csv", signal);
    write_text(dir / "truth.csv", clean);
    write_text(dir / "events.csv", events_csv(truth.events));
}

CheckOutcome check_run(const fs::path& run_dir, double tol)
{
    if (!(tol > 0)) throw UsageError("check tolerance must be > 0");
    json manifest;
    try {
        manifest = json::parse(read_text(run_dir / "manifest.json"));
    } catch (const json::parse_error& e) {
        throw DataError(std::string("manifest.json: ") + e.what());
    }
    const RunConfig config = RunConfig::from_json(manifest);
    double lambda = 0, gamma = 0;
    try {
        lambda = manifest.at("result").at("selected_lambda").get<double>();
        gamma = manifest.at("result").at("selected_gamma").get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("manifest.json has no usable result section: ") + e.what());
    }

    const Series series = read_series_file(config.input, config.csv);
    const Signal<double> signal(Eigen::Map<const Vector<double>>(series.values.data(), Eigen::Index(series.values.size())));
    const Dictionary<double> dict(config.dictionary_spec(signal.size()));
    const Problem<double> problem(dict, signal, config.center_signal);
    const auto coefficients = parse_coefficients(read_text(run_dir / "coefficients.csv"), dict);

    CheckOutcome out;
    out.lambda = lambda;
    out.kkt = kkt_check(problem, make_weights(problem, gamma), lambda, coefficients);
    out.threshold = tol * (1 + lambda) * std::max(1.0, problem.y_inf_norm());
    out.passed = out.kkt.max() < out.threshold;
    return out;
}

} // namespace l1atf::cli
