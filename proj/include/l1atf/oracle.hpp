#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "l1atf/dictionary.hpp"
#include "l1atf/problem.hpp"
#include "l1atf/solver.hpp"

// Dense reference solver and optimality checks. Everything here works on
// materialized matrices and shares no code path with the coordinate descent
// or the closed-form Gram entries.

namespace l1atf {

template <class Scalar>
struct DenseProblem {
    Matrix<Scalar> a;
    Vector<Scalar> y;
    Vector<Scalar> weights;  // +inf pins a coordinate at zero
    Scalar lambda = 0;
    Vector<Scalar> lower;
    Vector<Scalar> upper;

    static constexpr std::size_t max_rows = 256;

    Eigen::Index rows() const { return a.rows(); }
    Eigen::Index cols() const { return a.cols(); }

    void validate() const
    {
        if (static_cast<std::size_t>(a.rows()) > max_rows)
            throw UsageError("dense problems are limited to " + std::to_string(max_rows) + " rows");
        if (y.size() != a.rows()) throw UsageError("y length does not match matrix rows");
        if (weights.size() != a.cols() || lower.size() != a.cols() || upper.size() != a.cols())
            throw UsageError("per-column vectors do not match matrix columns");
        if (!(lambda >= Scalar(0))) throw UsageError("lambda must be >= 0");
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            if (lower[i] > Scalar(0) || upper[i] < Scalar(0)) throw UsageError("bounds must contain zero");
    }
};

/// Materializes the dictionary (mean-centred densely when `centered`).
template <class Scalar>
DenseProblem<Scalar> make_dense_problem(const Dictionary<Scalar>& dict, const Vector<Scalar>& y, bool centered,
                                        const AdaptiveWeights<Scalar>& weights, Scalar lambda)
{
    DenseProblem<Scalar> prob;
    prob.a = dict.materialize();
    prob.y = y;
    if (centered) {
        prob.a.rowwise() -= prob.a.colwise().mean();
        prob.y.array() -= prob.y.mean();
    }
    const auto p = prob.a.cols();
    prob.weights.resize(p);
    prob.lower.resize(p);
    prob.upper.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        prob.weights[i] = weights.weight(static_cast<std::size_t>(i));
        const auto b = dict.bounds(dict.column(static_cast<std::size_t>(i)).kind);
        prob.lower[i] = b.lower;
        prob.upper[i] = b.upper;
    }
    prob.lambda = lambda;
    prob.validate();
    return prob;
}

template <class Scalar>
Scalar dense_penalty(const DenseProblem<Scalar>& prob, const Vector<Scalar>& theta)
{
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (theta[i] == Scalar(0)) continue;
        if (!std::isfinite(prob.weights[i])) return std::numeric_limits<Scalar>::infinity();
        acc += prob.weights[i] * std::abs(theta[i]);
    }
    return prob.lambda * acc;
}

/// 1/(2n) |y - A theta|^2 + lambda sum w_i |theta_i|
template <class Scalar>
Scalar dense_objective(const DenseProblem<Scalar>& prob, const Vector<Scalar>& theta)
{
    const Scalar n = Scalar(prob.rows());
    return (prob.y - prob.a * theta).squaredNorm() / (2 * n) + dense_penalty(prob, theta);
}

struct OracleOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 2000000;
};

/// Accelerated proximal gradient (FISTA) with backtracking and adaptive
/// restart. Columns are rescaled to unit RMS internally; the penalty and box
/// are rescaled with them, so the problem solved is the same one.
///
/// Stops when the proximal-gradient fixed-point residual, measured in
/// gradient units, drops below `tol`.
template <class Scalar>
Vector<Scalar> oracle_solve(const DenseProblem<Scalar>& prob, const OracleOptions& opts = {})
{
    prob.validate();
    const Eigen::Index p = prob.cols();
    const Scalar n = Scalar(prob.rows());

    Vector<Scalar> scale(p);
    Matrix<Scalar> b = prob.a;
    for (Eigen::Index i = 0; i < p; ++i) {
        const Scalar c = std::sqrt(prob.a.col(i).squaredNorm() / n);
        scale[i] = c > Scalar(0) ? c : Scalar(1);
        b.col(i) /= scale[i];
    }
    const Matrix<Scalar> gram = b.transpose() * b / n;
    const Vector<Scalar> bty = b.transpose() * prob.y / n;

    Vector<Scalar> thr(p), lo(p), hi(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const bool pinned = !std::isfinite(prob.weights[i]);
        thr[i] = pinned ? Scalar(0) : prob.lambda * prob.weights[i] / scale[i];
        lo[i] = pinned ? Scalar(0) : prob.lower[i] * scale[i];
        hi[i] = pinned ? Scalar(0) : prob.upper[i] * scale[i];
    }

    auto smooth = [&](const Vector<Scalar>& phi) {
        return Scalar(0.5) * phi.dot(gram * phi) - bty.dot(phi);
    };
    auto gradient = [&](const Vector<Scalar>& phi) -> Vector<Scalar> { return gram * phi - bty; };
    auto prox = [&](const Vector<Scalar>& v, Scalar step) {
        Vector<Scalar> out(p);
        for (Eigen::Index i = 0; i < p; ++i) out[i] = std::clamp(soft_threshold(v[i], step * thr[i]), lo[i], hi[i]);
        return out;
    };
    auto total = [&](const Vector<Scalar>& phi) { return smooth(phi) + thr.dot(phi.cwiseAbs()); };

    Vector<Scalar> x = Vector<Scalar>::Zero(p);
    Vector<Scalar> z = x;
    Scalar t = 1;
    Scalar lip = 1;
    Scalar fx = total(x);

    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        const Vector<Scalar> gz = gradient(z);
        const Scalar fz = smooth(z);
        Vector<Scalar> next;
        for (;;) {
            next = prox(z - gz / lip, Scalar(1) / lip);
            const Vector<Scalar> d = next - z;
            if (smooth(next) <= fz + gz.dot(d) + lip / 2 * d.squaredNorm() + 64 * std::numeric_limits<Scalar>::epsilon() * std::abs(fz))
                break;
            lip *= 2;
        }
        const Scalar fnext = total(next);
        if (fnext > fx && t > Scalar(1)) {
            // restart momentum
            t = 1;
            z = x;
            continue;
        }
        const Scalar t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
        z = next + ((t - 1) / t_next) * (next - x);
        x = std::move(next);
        t = t_next;
        fx = fnext;

        const Vector<Scalar> gx = gradient(x);
        const Vector<Scalar> fixed = prox(x - gx / lip, Scalar(1) / lip);
        if (lip * (fixed - x).cwiseAbs().maxCoeff() < Scalar(opts.tol)) {
            Vector<Scalar> theta(p);
            for (Eigen::Index i = 0; i < p; ++i) theta[i] = x[i] / scale[i];
            return theta;
        }
        lip = std::max(lip / Scalar(1.1), std::numeric_limits<Scalar>::min());
    }
    throw NumericalError("reference solver did not converge in " + std::to_string(opts.max_iterations) + " iterations");
}

/// Worst violations of the optimality conditions, split by condition.
template <class Scalar>
struct KktReport {
    Scalar active = 0;    // |g_i - lambda w_i sign(theta_i)| on free nonzero coordinates
    Scalar inactive = 0;  // max(0, |g_i| - lambda w_i) on free zero coordinates
    Scalar bounded = 0;   // one-sided conditions on coordinates sitting at a bound

    Scalar max() const { return std::max({active, inactive, bounded}); }
};

/// Evaluates the conditions given g = A^T (y - A theta) / n.
template <class Scalar>
KktReport<Scalar> kkt_from_gradient(const Vector<Scalar>& g, const Vector<Scalar>& theta,
                                    const Vector<Scalar>& weights, Scalar lambda, const Vector<Scalar>& lower,
                                    const Vector<Scalar>& upper)
{
    KktReport<Scalar> r;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const Scalar v = theta[i];
        if (!std::isfinite(weights[i])) {
            if (v != Scalar(0)) r.active = inf;
            continue;
        }
        const Scalar thr = lambda * weights[i];
        const Scalar gi = g[i];
        if (v != Scalar(0)) {
            if (v == upper[i]) r.bounded = std::max(r.bounded, std::max(Scalar(0), thr - gi));
            else if (v == lower[i]) r.bounded = std::max(r.bounded, std::max(Scalar(0), gi + thr));
            else r.active = std::max(r.active, std::abs(gi - (v > 0 ? thr : -thr)));
        } else if (lower[i] == Scalar(0) && upper[i] == Scalar(0)) {
            continue;
        } else if (lower[i] == Scalar(0)) {
            r.bounded = std::max(r.bounded, std::max(Scalar(0), gi - thr));
        } else if (upper[i] == Scalar(0)) {
            r.bounded = std::max(r.bounded, std::max(Scalar(0), -gi - thr));
        } else {
            r.inactive = std::max(r.inactive, std::max(Scalar(0), std::abs(gi) - thr));
        }
    }
    return r;
}

template <class Scalar>
KktReport<Scalar> kkt_check(const DenseProblem<Scalar>& prob, const Vector<Scalar>& theta)
{
    prob.validate();
    const Vector<Scalar> g = prob.a.transpose() * (prob.y - prob.a * theta) / Scalar(prob.rows());
    return kkt_from_gradient(g, theta, prob.weights, prob.lambda, prob.lower, prob.upper);
}

/// Matrix-free variant for long signals: forms the residual from the
/// dictionary columns, then correlates it with every column by projection.
template <class Scalar>
KktReport<Scalar> kkt_check(const Problem<Scalar>& problem, const AdaptiveWeights<Scalar>& weights, Scalar lambda,
                            const SparseCoefficients<Scalar>& coefficients)
{
    const Dictionary<Scalar>& dict = problem.dictionary();
    const Vector<Scalar> theta = coefficients.to_dense(dict);
    Vector<Scalar> residual = problem.working_signal();
    for (const auto& [c, v] : coefficients.entries) {
        Vector<Scalar> col = dict.materialize(c);
        if (problem.centered()) col.array() -= col.mean();
        residual -= v * col;
    }
    // The centred residual has zero mean, so raw and centred columns agree.
    const SignalProjection<Scalar> proj(dict, std::span<const Scalar>(residual.data(), static_cast<std::size_t>(residual.size())));
    const Vector<Scalar> g = proj.dots() / Scalar(problem.n());
    const auto p = static_cast<Eigen::Index>(dict.size());
    Vector<Scalar> w(p), lo(p), hi(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        w[i] = weights.weight(static_cast<std::size_t>(i));
        const auto b = dict.bounds(dict.column(static_cast<std::size_t>(i)).kind);
        lo[i] = b.lower;
        hi[i] = b.upper;
    }
    return kkt_from_gradient(g, theta, w, lambda, lo, hi);
}

using DenseProblemd = DenseProblem<double>;
using KktReportd = KktReport<double>;

} // namespace l1atf
