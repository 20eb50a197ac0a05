#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "l1atf/dictionary.hpp"
#include "l1atf/problem.hpp"

namespace l1atf {

template <class Scalar>
Scalar soft_threshold(Scalar z, Scalar threshold)
{
    if (z > threshold) return z - threshold;
    if (z < -threshold) return z + threshold;
    return Scalar(0);
}

/// Per-column penalty weights 1 / |theta_ols|^gamma.
///
/// A zero OLS estimate gives an infinite weight (the column can never enter
/// the model) unless gamma is zero, in which case every weight is one.
template <class Scalar>
struct AdaptiveWeights {
    Vector<Scalar> theta_ols;
    Scalar gamma = 0;

    std::size_t size() const { return static_cast<std::size_t>(theta_ols.size()); }

    Scalar weight(std::size_t i) const
    {
        if (gamma == Scalar(0)) return Scalar(1);
        const Scalar a = std::abs(theta_ols[static_cast<Eigen::Index>(i)]);
        if (a == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
        return std::pow(a, -gamma);
    }

    bool usable(std::size_t i) const { return std::isfinite(weight(i)); }
};

/// Entry-wise (univariate) least squares estimate for every working column.
template <class Scalar>
Vector<Scalar> ols_init(const Problem<Scalar>& problem)
{
    Vector<Scalar> theta(static_cast<Eigen::Index>(problem.size()));
    for (std::size_t i = 0; i < problem.size(); ++i)
        theta[static_cast<Eigen::Index>(i)] = problem.xty(i) / problem.diag(i);
    return theta;
}

template <class Scalar>
AdaptiveWeights<Scalar> make_weights(Vector<Scalar> theta_ols, Scalar gamma)
{
    if (!(gamma >= Scalar(0)) || !std::isfinite(gamma)) throw UsageError("gamma must be finite and >= 0");
    for (Eigen::Index i = 0; i < theta_ols.size(); ++i)
        if (!std::isfinite(theta_ols[i])) throw NumericalError("non-finite OLS estimate at column " + std::to_string(i));
    return {std::move(theta_ols), gamma};
}

template <class Scalar>
AdaptiveWeights<Scalar> make_weights(const Problem<Scalar>& problem, Scalar gamma)
{
    return make_weights(ols_init(problem), gamma);
}

/// Nonzero coefficients keyed by column. The key set is the active set.
template <class Scalar>
struct SparseCoefficients {
    std::map<ColumnId, Scalar> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    std::vector<ColumnId> active() const
    {
        std::vector<ColumnId> out;
        out.reserve(entries.size());
        for (const auto& [c, v] : entries) out.push_back(c);
        return out;
    }

    Scalar get(const ColumnId& c) const
    {
        auto it = entries.find(c);
        return it == entries.end() ? Scalar(0) : it->second;
    }

    Vector<Scalar> to_dense(const Dictionary<Scalar>& dict) const
    {
        Vector<Scalar> theta = Vector<Scalar>::Zero(static_cast<Eigen::Index>(dict.size()));
        for (const auto& [c, v] : entries) theta[static_cast<Eigen::Index>(dict.index_of(c))] = v;
        return theta;
    }

    static SparseCoefficients from_dense(const Dictionary<Scalar>& dict, const Vector<Scalar>& theta)
    {
        SparseCoefficients out;
        for (std::size_t i = 0; i < dict.size(); ++i) {
            const Scalar v = theta[static_cast<Eigen::Index>(i)];
            if (v != Scalar(0)) out.entries.emplace(dict.column(i), v);
        }
        return out;
    }

    friend bool operator==(const SparseCoefficients&, const SparseCoefficients&) = default;
};

struct SolverConfig {
    // Pass-level stopping threshold, relative to max(1, |y|_inf). Changes are
    // measured as sigma_i^2 |delta theta_i|, the size of coordinate i's
    // optimality violation just before its update.
    double tol = 1e-7;
    std::size_t max_cycles = 10000;
    bool center_signal = true;
    // Run distinct gamma paths on separate threads.
    bool parallel_gamma = false;

    void validate() const
    {
        if (!(tol > 0)) throw UsageError("tol must be > 0");
        if (max_cycles < 1) throw UsageError("max_cycles must be >= 1");
    }
};

template <class Scalar>
struct FitResult {
    Scalar lambda = 0;
    Scalar gamma = 0;
    SparseCoefficients<Scalar> coefficients;
    Scalar rss = 0;
    std::size_t n_active = 0;
    bool converged = false;
    std::size_t cycles_used = 0;
    // Intercept added to A theta to give the fitted series.
    Scalar baseline = 0;
    // |y|^2 of the observed series, used to floor the EBIC log term.
    Scalar signal_sq_norm = 0;
};

/// Smallest lambda at which theta = 0 is optimal.
template <class Scalar>
Scalar lambda_max(const Problem<Scalar>& problem, const AdaptiveWeights<Scalar>& weights)
{
    const Scalar n = Scalar(problem.n());
    bool any = false;
    Scalar best = 0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        const Scalar w = weights.weight(i);
        if (!std::isfinite(w)) continue;
        any = true;
        best = std::max(best, std::abs(problem.xty(i)) / (n * w));
    }
    if (!any) throw DataError("every column has an infinite penalty weight; nothing can be fitted");
    // A few ulps up so that lambda * w_i does not round below |<y, A_i>| / n.
    return best * (Scalar(1) + 4 * std::numeric_limits<Scalar>::epsilon());
}

/// Cyclic coordinate descent with covariance updates.
///
/// Minimizes  1/(2n) |y - A theta|^2 + lambda sum_i w_i |theta_i|
/// subject to per-block boxes. The residual is never formed: the
/// correlation <r, A_i> comes from the cached <A_i, y> and the Gram columns
/// of the currently active coordinates.
template <class Scalar>
class CoordinateDescent {
public:
    struct PassStats {
        Scalar max_change = 0;
        bool active_changed = false;
    };

    CoordinateDescent(const Problem<Scalar>& problem, const AdaptiveWeights<Scalar>& weights)
        : problem_(&problem)
    {
        const std::size_t p = problem.size();
        if (weights.size() != p) throw UsageError("weight vector does not match dictionary size");
        theta_ = Vector<Scalar>::Zero(static_cast<Eigen::Index>(p));
        gram_cache_.resize(p);
        penalty_.resize(p);
        bounds_.resize(p);
        sigma_sq_.resize(p);
        const Scalar n = Scalar(problem.n());
        for (std::size_t i = 0; i < p; ++i) {
            penalty_[i] = weights.weight(i);
            bounds_[i] = problem.dictionary().bounds(problem.dictionary().column(i).kind);
            sigma_sq_[i] = problem.diag(i) / n;
        }
    }

    const Problem<Scalar>& problem() const { return *problem_; }
    const Vector<Scalar>& theta() const { return theta_; }
    const std::vector<std::size_t>& active() const { return active_; }

    void reset() { set_theta(Vector<Scalar>::Zero(theta_.size())); }

    void set_theta(const Vector<Scalar>& theta)
    {
        if (theta.size() != theta_.size()) throw UsageError("warm start has the wrong length");
        active_.clear();
        theta_ = theta;
        for (std::size_t i = 0; i < size(); ++i) {
            const Scalar v = theta_[static_cast<Eigen::Index>(i)];
            if (v == Scalar(0)) continue;
            if (!std::isfinite(penalty_[i])) throw UsageError("warm start uses an excluded column");
            if (bounds_[i].clamp(v) != v) throw UsageError("warm start violates bounds");
            activate(i);
        }
    }

    /// <r, A_i> with r = y - A theta.
    Scalar residual_correlation(std::size_t i) const
    {
        Scalar acc = problem_->xty(i);
        for (std::size_t k : active_) acc -= gram_cache_[k][static_cast<Eigen::Index>(i)] * theta_[static_cast<Eigen::Index>(k)];
        return acc;
    }

    /// <r_i, A_i> with r_i = y - sum_{k != i} A_k theta_k.
    Scalar partial_correlation(std::size_t i) const
    {
        return residual_correlation(i) + problem_->diag(i) * theta_[static_cast<Eigen::Index>(i)];
    }

    /// Minimizer of the objective along coordinate i, others fixed.
    Scalar coordinate_minimizer(std::size_t i, Scalar lambda) const
    {
        const Scalar n = Scalar(problem_->n());
        const Scalar z = partial_correlation(i) / n;
        const Scalar v = soft_threshold(z, lambda * penalty_[i]) / sigma_sq_[i];
        return bounds_[i].clamp(v);
    }

    /// Applies the exact coordinate update to i and returns the new value.
    /// Columns with an infinite weight are never touched.
    Scalar update(std::size_t i, Scalar lambda)
    {
        const auto ii = static_cast<Eigen::Index>(i);
        if (!std::isfinite(penalty_[i])) return theta_[ii];
        const Scalar v = coordinate_minimizer(i, lambda);
        if (!std::isfinite(v))
            throw NumericalError("non-finite coefficient for column " + to_string(problem_->dictionary().column(i)));
        const Scalar old = theta_[ii];
        theta_[ii] = v;
        if (old == Scalar(0) && v != Scalar(0)) activate(i);
        else if (old != Scalar(0) && v == Scalar(0)) deactivate(i);
        return v;
    }

    /// One sweep over all coordinates in canonical order.
    PassStats pass(Scalar lambda)
    {
        PassStats stats;
        for (std::size_t i = 0; i < size(); ++i) step(i, lambda, stats);
        return stats;
    }

    /// One sweep over the coordinates active at the start of the sweep.
    PassStats pass_active(Scalar lambda)
    {
        PassStats stats;
        std::vector<std::size_t> order = active_;
        std::sort(order.begin(), order.end());
        for (std::size_t i : order) step(i, lambda, stats);
        return stats;
    }

    /// Minimizes over the current active set with every other coordinate
    /// held at zero, until a sweep moves nothing by more than `threshold`.
    /// Active-set sweeps are cheap; a face Newton step is taken whenever a
    /// sweep fails to halve the previous change.
    void solve_active(Scalar lambda, Scalar threshold, std::size_t max_rounds)
    {
        Scalar previous = std::numeric_limits<Scalar>::infinity();
        for (std::size_t round = 0; round < max_rounds && !active_.empty(); ++round) {
            const auto stats = pass_active(lambda);
            if (!stats.active_changed && stats.max_change < threshold) return;
            if (stats.max_change > previous / 2) {
                refine_face(lambda);
                previous = std::numeric_limits<Scalar>::infinity();
            } else {
                previous = stats.max_change;
            }
        }
    }

    /// Newton step on the current face of the objective.
    ///
    /// Free active coordinates keep their signs and coordinates sitting at a
    /// bound stay there, which makes the objective an exact quadratic in the
    /// free coordinates. The full step is tried first with coordinates that
    /// would change sign set to zero (projected Newton, backtracked a few
    /// times). If that does not lower the objective, the step is cut short
    /// where the first coordinate reaches zero or a bound, and at the line
    /// minimum. Either way the objective never increases. Only Gram entries
    /// among active columns are needed. Returns false if no step was taken.
    bool refine_face(Scalar lambda)
    {
        std::vector<std::size_t> act = active_;
        std::sort(act.begin(), act.end());
        std::vector<Eigen::Index> free_pos;
        for (std::size_t a = 0; a < act.size(); ++a) {
            const std::size_t k = act[a];
            const Scalar v = theta_[static_cast<Eigen::Index>(k)];
            if (v != bounds_[k].lower && v != bounds_[k].upper) free_pos.push_back(static_cast<Eigen::Index>(a));
        }
        if (free_pos.empty()) return false;

        const auto na = static_cast<Eigen::Index>(act.size());
        const auto m = static_cast<Eigen::Index>(free_pos.size());
        const Scalar n = Scalar(problem_->n());
        Matrix<Scalar> ga(na, na);
        Vector<Scalar> xty(na), cur(na), pen(na);
        for (Eigen::Index a = 0; a < na; ++a) {
            const std::size_t ka = act[static_cast<std::size_t>(a)];
            for (Eigen::Index b = 0; b < na; ++b)
                ga(a, b) = gram_cache_[act[static_cast<std::size_t>(b)]][static_cast<Eigen::Index>(ka)];
            xty[a] = problem_->xty(ka);
            cur[a] = theta_[static_cast<Eigen::Index>(ka)];
            pen[a] = lambda * penalty_[ka];
        }
        // objective up to the constant |y|^2 / (2n), restricted to the active set
        auto face_objective = [&](const Vector<Scalar>& v) {
            return (Scalar(0.5) * v.dot(ga * v) - v.dot(xty)) / n + pen.dot(v.cwiseAbs());
        };
        const Vector<Scalar> corr = xty - ga * cur;

        Matrix<Scalar> g(m, m);
        Vector<Scalar> rhs(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < m; ++b) g(a, b) = ga(free_pos[a], free_pos[b]);
            const Scalar v = cur[free_pos[a]];
            rhs[a] = corr[free_pos[a]] - n * pen[free_pos[a]] * (v > Scalar(0) ? Scalar(1) : Scalar(-1));
        }
        // Faces can be rank deficient (slope_j - slope_j+1 = step_j), so the
        // system gets a tiny relative ridge. The direction stays a descent
        // direction; along near-null directions the step runs until a
        // coordinate reaches zero.
        Matrix<Scalar> reg = g;
        reg.diagonal() *= Scalar(1) + Scalar(1e-9);
        const Eigen::LDLT<Matrix<Scalar>> ldlt(reg);
        if (ldlt.info() != Eigen::Success) return false;
        const Vector<Scalar> d = ldlt.solve(rhs);
        if (!d.allFinite()) return false;
        const Scalar slope = rhs.dot(d);
        const Scalar curvature = d.dot(g * d);
        if (!(slope > Scalar(0)) || !(curvature > Scalar(0))) return false;

        const Scalar f0 = face_objective(cur);
        for (Scalar alpha = 1; alpha > Scalar(1e-2); alpha /= 4) {
            Vector<Scalar> trial = cur;
            for (Eigen::Index a = 0; a < m; ++a) {
                const std::size_t k = act[static_cast<std::size_t>(free_pos[a])];
                const Scalar old = cur[free_pos[a]];
                Scalar v = old + alpha * d[a];
                if ((old > Scalar(0) && v < Scalar(0)) || (old < Scalar(0) && v > Scalar(0))) v = Scalar(0);
                trial[free_pos[a]] = bounds_[k].clamp(v);
            }
            if (face_objective(trial) < f0) {
                commit(act, trial);
                return true;
            }
        }

        Scalar alpha = std::min(Scalar(1), slope / curvature);
        std::vector<Scalar> limit(static_cast<std::size_t>(m), std::numeric_limits<Scalar>::infinity());
        std::vector<Scalar> target(static_cast<std::size_t>(m), Scalar(0));
        for (Eigen::Index a = 0; a < m; ++a) {
            const std::size_t k = act[static_cast<std::size_t>(free_pos[a])];
            const Scalar v = cur[free_pos[a]];
            const Scalar da = d[a];
            auto& lim = limit[static_cast<std::size_t>(a)];
            if ((v > Scalar(0) && da < Scalar(0)) || (v < Scalar(0) && da > Scalar(0))) {
                lim = -v / da;
            } else if (da > Scalar(0) && std::isfinite(bounds_[k].upper)) {
                lim = (bounds_[k].upper - v) / da;
                target[static_cast<std::size_t>(a)] = bounds_[k].upper;
            } else if (da < Scalar(0) && std::isfinite(bounds_[k].lower)) {
                lim = (bounds_[k].lower - v) / da;
                target[static_cast<std::size_t>(a)] = bounds_[k].lower;
            }
            alpha = std::min(alpha, lim);
        }
        if (!(alpha > Scalar(0))) return false;

        Vector<Scalar> next = cur;
        for (Eigen::Index a = 0; a < m; ++a) {
            const std::size_t k = act[static_cast<std::size_t>(free_pos[a])];
            const Scalar old = cur[free_pos[a]];
            Scalar v = limit[static_cast<std::size_t>(a)] <= alpha ? target[static_cast<std::size_t>(a)] : old + alpha * d[a];
            if ((old > Scalar(0) && v < Scalar(0)) || (old < Scalar(0) && v > Scalar(0))) v = Scalar(0);
            next[free_pos[a]] = bounds_[k].clamp(v);
        }
        commit(act, next);
        return true;
    }

    /// Working-scale fitted values A theta (without intercept), O(n k).
    Vector<Scalar> fitted() const
    {
        Vector<Scalar> f = Vector<Scalar>::Zero(static_cast<Eigen::Index>(problem_->n()));
        for (std::size_t k : active_) f += theta_[static_cast<Eigen::Index>(k)] * problem_->working_column(k);
        return f;
    }

    Scalar rss() const { return (problem_->working_signal() - fitted()).squaredNorm(); }

    Scalar penalty_term(Scalar lambda) const
    {
        Scalar acc = 0;
        for (std::size_t k : active_) acc += penalty_[k] * std::abs(theta_[static_cast<Eigen::Index>(k)]);
        return lambda * acc;
    }

    Scalar objective(Scalar lambda) const { return rss() / (2 * Scalar(problem_->n())) + penalty_term(lambda); }

    std::size_t size() const { return static_cast<std::size_t>(theta_.size()); }

private:
    void step(std::size_t i, Scalar lambda, PassStats& stats)
    {
        if (!std::isfinite(penalty_[i])) return;
        const Scalar old = theta_[static_cast<Eigen::Index>(i)];
        const Scalar v = update(i, lambda);
        if ((old == Scalar(0)) != (v == Scalar(0))) stats.active_changed = true;
        stats.max_change = std::max(stats.max_change, sigma_sq_[i] * std::abs(v - old));
    }

    // Writes new values for the (sorted) active columns `act`.
    void commit(const std::vector<std::size_t>& act, const Vector<Scalar>& values)
    {
        for (std::size_t a = 0; a < act.size(); ++a) {
            const std::size_t k = act[a];
            const Scalar v = values[static_cast<Eigen::Index>(a)];
            if (!std::isfinite(v))
                throw NumericalError("non-finite coefficient for column " + to_string(problem_->dictionary().column(k)));
            theta_[static_cast<Eigen::Index>(k)] = v;
            if (v == Scalar(0)) deactivate(k);
        }
    }

    void activate(std::size_t i)
    {
        active_.push_back(i);
        if (gram_cache_[i].size() == 0) {
            Vector<Scalar> col(static_cast<Eigen::Index>(size()));
            for (std::size_t j = 0; j < size(); ++j) col[static_cast<Eigen::Index>(j)] = problem_->gram(j, i);
            gram_cache_[i] = std::move(col);
        }
    }

    void deactivate(std::size_t i)
    {
        active_.erase(std::find(active_.begin(), active_.end(), i));
    }

    const Problem<Scalar>* problem_;
    Vector<Scalar> theta_;
    std::vector<std::size_t> active_;
    std::vector<Vector<Scalar>> gram_cache_;
    std::vector<Scalar> penalty_;
    std::vector<Bounds<Scalar>> bounds_;
    std::vector<Scalar> sigma_sq_;
};

namespace detail {

template <class Scalar>
FitResult<Scalar> run_to_convergence(CoordinateDescent<Scalar>& cd, Scalar lambda, Scalar gamma,
                                     const SolverConfig& config)
{
    const Problem<Scalar>& problem = cd.problem();
    const Scalar threshold = Scalar(config.tol) * std::max(Scalar(1), problem.y_inf_norm());
    FitResult<Scalar> out;
    out.lambda = lambda;
    out.gamma = gamma;
    for (std::size_t cycle = 1; cycle <= config.max_cycles; ++cycle) {
        const auto stats = cd.pass(lambda);
        out.cycles_used = cycle;
        if (!stats.active_changed && stats.max_change < threshold) {
            out.converged = true;
            break;
        }
        cd.solve_active(lambda, threshold, config.max_cycles);
    }
    const Dictionary<Scalar>& dict = problem.dictionary();
    out.coefficients = SparseCoefficients<Scalar>::from_dense(dict, cd.theta());
    out.n_active = out.coefficients.size();
    out.rss = cd.rss();
    out.baseline = problem.baseline(cd.theta());
    out.signal_sq_norm = problem.y_sq_norm();
    return out;
}

} // namespace detail

/// Solves one (lambda, gamma) point from a warm start.
template <class Scalar>
FitResult<Scalar> fit_single(const Problem<Scalar>& problem, Scalar lambda, const AdaptiveWeights<Scalar>& weights,
                             const SparseCoefficients<Scalar>& warm, const SolverConfig& config)
{
    config.validate();
    if (!(lambda >= Scalar(0))) throw UsageError("lambda must be >= 0");
    CoordinateDescent<Scalar> cd(problem, weights);
    cd.set_theta(warm.to_dense(problem.dictionary()));
    return detail::run_to_convergence(cd, lambda, weights.gamma, config);
}

template <class Scalar>
FitResult<Scalar> fit_single(const Problem<Scalar>& problem, Scalar lambda, const AdaptiveWeights<Scalar>& weights,
                             const SolverConfig& config = {})
{
    return fit_single(problem, lambda, weights, SparseCoefficients<Scalar>{}, config);
}

/// The (lambda, gamma) grid. An empty `lambdas` means a per-gamma automatic
/// grid: `lambda_count` values log-spaced from lambda_max down to
/// `lambda_min_ratio * lambda_max`.
template <class Scalar>
struct PathGrid {
    std::vector<Scalar> lambdas;
    std::size_t lambda_count = 50;
    Scalar lambda_min_ratio = Scalar(1e-4);
    std::vector<Scalar> gammas{Scalar(0), Scalar(0.5), Scalar(1), Scalar(2)};

    void validate() const
    {
        if (gammas.empty()) throw UsageError("gamma grid is empty");
        for (Scalar g : gammas)
            if (!(g >= Scalar(0)) || !std::isfinite(g)) throw UsageError("gamma values must be finite and >= 0");
        if (lambdas.empty()) {
            if (lambda_count < 1) throw UsageError("lambda count must be >= 1");
            if (!(lambda_min_ratio > Scalar(0) && lambda_min_ratio <= Scalar(1)))
                throw UsageError("lambda ratio must lie in (0, 1]");
        }
        for (Scalar l : lambdas)
            if (!(l >= Scalar(0)) || !std::isfinite(l)) throw UsageError("lambda values must be finite and >= 0");
    }
};

/// Log-spaced decreasing lambda grid from `top` to `ratio * top`.
template <class Scalar>
std::vector<Scalar> log_lambda_grid(Scalar top, std::size_t count, Scalar ratio)
{
    if (top <= Scalar(0)) return {Scalar(0)};
    std::vector<Scalar> out(count);
    if (count == 1) return {top};
    const Scalar step = std::log(ratio) / Scalar(count - 1);
    for (std::size_t k = 0; k < count; ++k) out[k] = top * std::exp(step * Scalar(k));
    out.front() = top;
    return out;
}

/// Lambda values the path will visit for one gamma, in visiting order.
template <class Scalar>
std::vector<Scalar> resolve_lambdas(const Problem<Scalar>& problem, const AdaptiveWeights<Scalar>& weights,
                                    const PathGrid<Scalar>& grid)
{
    std::vector<Scalar> lambdas = grid.lambdas;
    if (lambdas.empty())
        lambdas = log_lambda_grid(lambda_max(problem, weights), grid.lambda_count, grid.lambda_min_ratio);
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    return lambdas;
}

/// Warm-started path over lambda (decreasing) for each gamma.
/// Results are ordered by gamma as given, then by decreasing lambda.
template <class Scalar>
std::vector<FitResult<Scalar>> fit_path(const Problem<Scalar>& problem, const PathGrid<Scalar>& grid,
                                        const SolverConfig& config)
{
    config.validate();
    grid.validate();
    const Vector<Scalar> theta_ols = ols_init(problem);

    auto run_gamma = [&](Scalar gamma) {
        const AdaptiveWeights<Scalar> weights = make_weights(theta_ols, gamma);
        const std::vector<Scalar> lambdas = resolve_lambdas(problem, weights, grid);
        CoordinateDescent<Scalar> cd(problem, weights);
        std::vector<FitResult<Scalar>> out;
        out.reserve(lambdas.size());
        for (Scalar lambda : lambdas) {
            try {
                out.push_back(detail::run_to_convergence(cd, lambda, gamma, config));
            } catch (const NumericalError& e) {
                throw NumericalError(std::string(e.what()) + " (lambda=" + std::to_string(double(lambda)) +
                                     ", gamma=" + std::to_string(double(gamma)) + ")");
            }
        }
        return out;
    };

    std::vector<std::vector<FitResult<Scalar>>> per_gamma(grid.gammas.size());
    if (config.parallel_gamma && grid.gammas.size() > 1) {
        std::vector<std::future<std::vector<FitResult<Scalar>>>> jobs;
        for (Scalar g : grid.gammas) jobs.push_back(std::async(std::launch::async, run_gamma, g));
        for (std::size_t k = 0; k < jobs.size(); ++k) per_gamma[k] = jobs[k].get();
    } else {
        for (std::size_t k = 0; k < grid.gammas.size(); ++k) per_gamma[k] = run_gamma(grid.gammas[k]);
    }

    std::vector<FitResult<Scalar>> results;
    for (auto& block : per_gamma)
        for (auto& r : block) results.push_back(std::move(r));
    return results;
}

template <class Scalar>
std::vector<FitResult<Scalar>> fit_path(const Dictionary<Scalar>& dict, const Signal<Scalar>& y,
                                        const PathGrid<Scalar>& grid, const SolverConfig& config)
{
    const Problem<Scalar> problem(dict, y, config.center_signal);
    return fit_path(problem, grid, config);
}

using FitResultd = FitResult<double>;
using SparseCoefficientsd = SparseCoefficients<double>;
using AdaptiveWeightsd = AdaptiveWeights<double>;
using PathGridd = PathGrid<double>;

} // namespace l1atf
