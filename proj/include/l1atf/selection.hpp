#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "l1atf/solver.hpp"

namespace l1atf {

/// Extended BIC of one fit:
///   n ln(max(rss, eps) / n) + k ln(n) + 2 xi k ln(p),  eps = 1e-12 |y|^2
/// where k is the active-set size and p the number of candidate columns.
template <class Scalar>
Scalar ebic_score(const FitResult<Scalar>& fit, std::size_t n, std::size_t p, Scalar xi)
{
    if (n < 1 || p < 1) throw UsageError("ebic needs n >= 1 and p >= 1");
    if (!(xi >= Scalar(0) && xi <= Scalar(1))) throw UsageError("ebic xi must lie in [0, 1]");
    const Scalar nn = Scalar(n);
    const Scalar k = Scalar(fit.n_active);
    Scalar rss = std::max(fit.rss, Scalar(1e-12) * fit.signal_sq_norm);
    if (rss <= Scalar(0)) rss = std::numeric_limits<Scalar>::min();
    return nn * std::log(rss / nn) + k * std::log(nn) + 2 * xi * k * std::log(Scalar(p));
}

template <class Scalar>
struct SelectionReport {
    // One score per input fit, aligned with the input; NaN where excluded.
    std::vector<Scalar> scores;
    std::size_t best_index = 0;
    Scalar best_lambda = 0;
    Scalar best_gamma = 0;
    FitResult<Scalar> best_fit;
    Scalar ebic_xi = 1;
};

/// Picks the converged fit with the lowest EBIC. Ties go to the larger
/// lambda, then the larger gamma.
template <class Scalar>
SelectionReport<Scalar> select_model(const std::vector<FitResult<Scalar>>& results, std::size_t n, std::size_t p,
                                     Scalar xi = Scalar(1))
{
    if (results.empty()) throw SelectionError("no fits to select from");
    SelectionReport<Scalar> report;
    report.ebic_xi = xi;
    report.scores.assign(results.size(), std::numeric_limits<Scalar>::quiet_NaN());
    bool found = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& fit = results[i];
        if (!fit.converged) continue;
        const Scalar score = ebic_score(fit, n, p, xi);
        report.scores[i] = score;
        if (!found) {
            report.best_index = i;
            found = true;
            continue;
        }
        const auto& best = results[report.best_index];
        const Scalar best_score = report.scores[report.best_index];
        const bool better = score < best_score ||
                            (score == best_score &&
                             (fit.lambda > best.lambda || (fit.lambda == best.lambda && fit.gamma > best.gamma)));
        if (better) report.best_index = i;
    }
    if (!found) throw SelectionError("no converged fit in the grid");
    report.best_fit = results[report.best_index];
    report.best_lambda = report.best_fit.lambda;
    report.best_gamma = report.best_fit.gamma;
    return report;
}

using SelectionReportd = SelectionReport<double>;

} // namespace l1atf
