#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "l1atf/l1atf.hpp"

namespace l1atf::testing {

// Small seeded problem: sparse planted signal plus noise, a random frequency
// set, a gamma from the default grid and lambda somewhere below lambda_max.
struct RandomInstance {
    DictionarySpecd spec;
    Signald signal;
    double gamma = 0;
    double lambda_ratio = 0.1;
};

inline RandomInstance random_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform_index = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };

    RandomInstance inst;
    const std::size_t n = uniform_index(10, 50);
    inst.spec.n = n;
    const std::size_t nf = uniform_index(0, 3);
    std::vector<double> omega;
    while (omega.size() < nf) {
        const double w = 0.2 + (std::numbers::pi - 0.2) * unit(rng);
        if (std::none_of(omega.begin(), omega.end(), [&](double v) { return std::abs(v - w) < 1e-3; }))
            omega.push_back(w);
    }
    std::sort(omega.begin(), omega.end());
    inst.spec.omega = omega;
    if (unit(rng) < 0.25) inst.spec.bounds[BlockKind::Step] = {0.0, std::numeric_limits<double>::infinity()};

    SyntheticSpecd synth;
    synth.n = n;
    synth.level = 4 * unit(rng) - 2;
    for (std::size_t k = uniform_index(0, 2); k > 0; --k) synth.steps.push_back({uniform_index(1, n - 1), 6 * unit(rng) - 3});
    if (unit(rng) < 0.5) synth.spikes.push_back({uniform_index(0, n - 1), 8 * unit(rng) - 4});
    if (unit(rng) < 0.5) synth.slopes.push_back({uniform_index(0, n - 2), 0.4 * unit(rng) - 0.2});
    if (!omega.empty()) synth.sinusoids.push_back({omega[uniform_index(0, omega.size() - 1)], unit(rng), unit(rng)});
    synth.noise_sigma = 0.05 + 0.45 * unit(rng);
    synth.rng_seed = seed * 7919 + 1;
    inst.signal = generate(synth).first;

    const double gammas[] = {0.0, 0.5, 1.0, 2.0};
    inst.gamma = gammas[uniform_index(0, 3)];
    inst.lambda_ratio = std::pow(10.0, -3.0 + 2.7 * unit(rng));
    return inst;
}

} // namespace l1atf::testing
