#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "l1atf/dictionary.hpp"
#include "l1atf/problem.hpp"
#include "l1atf/solver.hpp"

namespace l1atf {

enum class EventKind : std::uint8_t { Knot, LevelShift, Outlier, Frequency };

inline constexpr std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::Knot: return "knot";
    case EventKind::LevelShift: return "level_shift";
    case EventKind::Outlier: return "outlier";
    case EventKind::Frequency: return "frequency";
    }
    return "?";
}

/// A detected (or planted) component.
///
/// `location` is a sample index for knots, level shifts and outliers, and an
/// angular frequency for Frequency events. A level shift at t means the new
/// level starts at sample t; a knot at t means the slope changes after t.
template <class Scalar>
struct Event {
    EventKind kind = EventKind::LevelShift;
    Scalar location = 0;
    Scalar magnitude = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

template <class Scalar>
struct Decomposition {
    Vector<Scalar> x;  // piecewise-linear trend
    Vector<Scalar> w;  // level shifts
    Vector<Scalar> u;  // outliers
    Vector<Scalar> s;  // seasonal
    Scalar baseline = 0;
    Vector<Scalar> fitted;
    std::vector<Event<Scalar>> events;
};

/// Component series and events of a fit. Sine/cosine pairs at the same
/// frequency merge into one Frequency event with amplitude sqrt(a^2 + b^2).
template <class Scalar>
Decomposition<Scalar> reconstruct(const Dictionary<Scalar>& dict, const SparseCoefficients<Scalar>& coefficients,
                                  Scalar baseline)
{
    const auto n = static_cast<Eigen::Index>(dict.n());
    Decomposition<Scalar> d;
    d.x = d.w = d.u = d.s = Vector<Scalar>::Zero(n);
    d.baseline = baseline;
    std::map<std::size_t, std::pair<Scalar, Scalar>> trig;
    for (const auto& [c, v] : coefficients.entries) {
        dict.require(c);
        switch (c.kind) {
        case BlockKind::Slope:
            d.x += v * dict.materialize(c);
            d.events.push_back({EventKind::Knot, Scalar(c.index), v});
            break;
        case BlockKind::Step:
            d.w += v * dict.materialize(c);
            d.events.push_back({EventKind::LevelShift, Scalar(c.index + 1), v});
            break;
        case BlockKind::Spike:
            d.u[static_cast<Eigen::Index>(c.index)] += v;
            d.events.push_back({EventKind::Outlier, Scalar(c.index), v});
            break;
        case BlockKind::Sine:
            d.s += v * dict.materialize(c);
            trig[c.index].first = v;
            break;
        case BlockKind::Cosine:
            d.s += v * dict.materialize(c);
            trig[c.index].second = v;
            break;
        }
    }
    for (const auto& [k, ab] : trig)
        d.events.push_back({EventKind::Frequency, dict.spec().omega[k], std::hypot(ab.first, ab.second)});
    d.fitted = ((d.x + d.w) + (d.u + d.s)).array() + baseline;
    return d;
}

template <class Scalar>
Decomposition<Scalar> reconstruct(const Dictionary<Scalar>& dict, const FitResult<Scalar>& fit)
{
    return reconstruct(dict, fit.coefficients, fit.baseline);
}

template <class Scalar>
struct PlantedComponent {
    std::size_t index = 0;
    Scalar magnitude = 0;
};

template <class Scalar>
struct PlantedSinusoid {
    Scalar omega = 0;
    Scalar a = 0;  // sine amplitude
    Scalar b = 0;  // cosine amplitude
};

/// Synthetic signal with planted ground truth.
///
/// Slope index k: trend bends after sample k (k in [0, n-2]).
/// Step index k: new level starts at sample k (k in [1, n-1]).
/// Spike index k: single-sample outlier (k in [0, n-1]).
template <class Scalar>
struct SyntheticSpec {
    std::size_t n = 0;
    Scalar level = 0;
    std::vector<PlantedComponent<Scalar>> slopes;
    std::vector<PlantedComponent<Scalar>> steps;
    std::vector<PlantedComponent<Scalar>> spikes;
    std::vector<PlantedSinusoid<Scalar>> sinusoids;
    Scalar noise_sigma = 0;
    std::uint64_t rng_seed = 0;

    void validate() const
    {
        if (n < 3) throw UsageError("synthetic signal needs n >= 3");
        for (const auto& c : slopes)
            if (c.index + 2 > n) throw UsageError("planted slope index out of range");
        for (const auto& c : steps)
            if (c.index < 1 || c.index >= n) throw UsageError("planted step index out of range");
        for (const auto& c : spikes)
            if (c.index >= n) throw UsageError("planted spike index out of range");
        for (const auto& s : sinusoids)
            if (!(s.omega > 0) || s.omega > std::numbers::pi_v<Scalar>) throw UsageError("planted frequency outside (0, pi]");
        if (!(noise_sigma >= 0)) throw UsageError("noise sigma must be >= 0");
    }

    /// Dictionary columns carrying the planted components.
    std::set<ColumnId> planted_columns(const Dictionary<Scalar>& dict) const
    {
        std::set<ColumnId> out;
        for (const auto& c : slopes)
            if (c.magnitude != 0) out.insert({BlockKind::Slope, c.index});
        for (const auto& c : steps)
            if (c.magnitude != 0) out.insert({BlockKind::Step, c.index - 1});
        for (const auto& c : spikes)
            if (c.magnitude != 0) out.insert({BlockKind::Spike, c.index});
        const auto& omega = dict.spec().omega;
        for (const auto& s : sinusoids) {
            auto it = std::find(omega.begin(), omega.end(), s.omega);
            if (it == omega.end()) throw UsageError("planted frequency is not in the dictionary");
            const auto k = static_cast<std::size_t>(it - omega.begin());
            if (s.a != 0) out.insert({BlockKind::Sine, k});
            if (s.b != 0) out.insert({BlockKind::Cosine, k});
        }
        return out;
    }
};

/// Draws y = clean + N(0, sigma^2) noise; the returned decomposition is the
/// clean ground truth (baseline = level).
template <class Scalar>
std::pair<Signal<Scalar>, Decomposition<Scalar>> generate(const SyntheticSpec<Scalar>& spec)
{
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n);
    Decomposition<Scalar> truth;
    truth.x = truth.w = truth.u = truth.s = Vector<Scalar>::Zero(n);
    truth.baseline = spec.level;
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        for (const auto& c : spec.slopes)
            if (ut > c.index) truth.x[t] += c.magnitude * Scalar(ut - c.index);
        for (const auto& c : spec.steps)
            if (ut >= c.index) truth.w[t] += c.magnitude;
        for (const auto& c : spec.spikes)
            if (ut == c.index) truth.u[t] += c.magnitude;
        for (const auto& s : spec.sinusoids)
            truth.s[t] += s.a * std::sin(s.omega * Scalar(t)) + s.b * std::cos(s.omega * Scalar(t));
    }
    for (const auto& c : spec.slopes)
        if (c.magnitude != 0) truth.events.push_back({EventKind::Knot, Scalar(c.index), c.magnitude});
    for (const auto& c : spec.steps)
        if (c.magnitude != 0) truth.events.push_back({EventKind::LevelShift, Scalar(c.index), c.magnitude});
    for (const auto& c : spec.spikes)
        if (c.magnitude != 0) truth.events.push_back({EventKind::Outlier, Scalar(c.index), c.magnitude});
    for (const auto& s : spec.sinusoids)
        if (s.a != 0 || s.b != 0) truth.events.push_back({EventKind::Frequency, s.omega, std::hypot(s.a, s.b)});
    truth.fitted = ((truth.x + truth.w) + (truth.u + truth.s)).array() + spec.level;

    Vector<Scalar> y = truth.fitted;
    if (spec.noise_sigma > 0) {
        std::mt19937_64 rng(spec.rng_seed);
        std::normal_distribution<double> noise(0.0, double(spec.noise_sigma));
        for (Eigen::Index t = 0; t < n; ++t) y[t] += Scalar(noise(rng));
    }
    return {Signal<Scalar>(std::move(y)), std::move(truth)};
}

using Decompositiond = Decomposition<double>;
using Eventd = Event<double>;
using SyntheticSpecd = SyntheticSpec<double>;

} // namespace l1atf
