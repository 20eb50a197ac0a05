#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "l1atf/dictionary.hpp"

namespace l1atf {

/// An observed series. Timestamps are carried along for output only.
template <class Scalar>
struct Signal {
    Vector<Scalar> values;
    std::optional<std::vector<std::string>> timestamps;

    Signal() = default;
    explicit Signal(Vector<Scalar> v, std::optional<std::vector<std::string>> ts = std::nullopt)
        : values(std::move(v)), timestamps(std::move(ts))
    {
    }

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    std::span<const Scalar> span() const { return {values.data(), size()}; }

    void validate() const
    {
        if (size() < 3) throw UsageError("signal needs at least 3 samples, got " + std::to_string(size()));
        for (Eigen::Index t = 0; t < values.size(); ++t)
            if (!std::isfinite(values[t])) throw DataError("non-finite sample at index " + std::to_string(t));
        if (timestamps && timestamps->size() != size())
            throw UsageError("timestamp count does not match sample count");
    }
};

/// The regression problem the solver works on: dictionary plus signal.
///
/// With `centered` set, both the signal and every column are mean-centred,
/// which is the same as fitting an unpenalized intercept. Column statistics
/// are derived from the dictionary closed forms, so nothing of size n x p is
/// ever formed. With `centered` unset this is the raw dictionary.
template <class Scalar>
class Problem {
public:
    Problem(const Dictionary<Scalar>& dict, const Signal<Scalar>& y, bool centered)
        : dict_(&dict), centered_(centered), y_(y.values)
    {
        y.validate();
        if (y.size() != dict.n())
            throw UsageError("signal length " + std::to_string(y.size()) + " does not match dictionary length " +
                             std::to_string(dict.n()));
        const std::size_t p = dict.size();
        const Scalar n = Scalar(dict.n());
        mean_ = centered ? y_.mean() : Scalar(0);
        SignalProjection<Scalar> proj(dict, y.span());
        col_mean_ = Vector<Scalar>::Zero(static_cast<Eigen::Index>(p));
        xty_.resize(static_cast<Eigen::Index>(p));
        diag_.resize(static_cast<Eigen::Index>(p));
        for (std::size_t i = 0; i < p; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const ColumnId& c = dict.column(i);
            if (centered) col_mean_[ii] = dict.column_sum(c) / n;
            // <A_i - mean_i, y - ybar> = <A_i, y> - n mean_i ybar
            xty_[ii] = proj.dot(i) - n * col_mean_[ii] * mean_;
            diag_[ii] = dict.gram(c, c) - n * col_mean_[ii] * col_mean_[ii];
        }
        y_sq_norm_ = y_.squaredNorm();
        y_inf_norm_ = y_.cwiseAbs().maxCoeff();
    }

    const Dictionary<Scalar>& dictionary() const { return *dict_; }
    bool centered() const { return centered_; }
    std::size_t n() const { return dict_->n(); }
    std::size_t size() const { return dict_->size(); }

    /// Observed series (uncentred).
    const Vector<Scalar>& y() const { return y_; }
    Scalar y_mean() const { return mean_; }
    Scalar y_sq_norm() const { return y_sq_norm_; }
    Scalar y_inf_norm() const { return y_inf_norm_; }

    /// Working-column inner products, O(1) each.
    Scalar gram(std::size_t a, std::size_t b) const
    {
        const auto ai = static_cast<Eigen::Index>(a);
        const auto bi = static_cast<Eigen::Index>(b);
        return dict_->gram(a, b) - Scalar(n()) * col_mean_[ai] * col_mean_[bi];
    }

    Scalar diag(std::size_t i) const { return diag_[static_cast<Eigen::Index>(i)]; }
    Scalar xty(std::size_t i) const { return xty_[static_cast<Eigen::Index>(i)]; }
    const Vector<Scalar>& xty() const { return xty_; }
    const Vector<Scalar>& column_means() const { return col_mean_; }

    /// Working column i as a dense vector.
    Vector<Scalar> working_column(std::size_t i) const
    {
        Vector<Scalar> col = dict_->materialize(dict_->column(i));
        col.array() -= col_mean_[static_cast<Eigen::Index>(i)];
        return col;
    }

    /// Dense working matrix and working signal, for the reference solver.
    Matrix<Scalar> working_matrix() const
    {
        Matrix<Scalar> a(static_cast<Eigen::Index>(n()), static_cast<Eigen::Index>(size()));
        for (std::size_t j = 0; j < size(); ++j) a.col(static_cast<Eigen::Index>(j)) = working_column(j);
        return a;
    }

    Vector<Scalar> working_signal() const { return y_.array() - mean_; }

    /// Intercept implied by coefficients (dense, length p).
    Scalar baseline(const Vector<Scalar>& theta) const
    {
        return centered_ ? mean_ - col_mean_.dot(theta) : Scalar(0);
    }

private:
    const Dictionary<Scalar>* dict_;
    bool centered_;
    Vector<Scalar> y_;
    Scalar mean_ = 0;
    Vector<Scalar> col_mean_;
    Vector<Scalar> xty_;
    Vector<Scalar> diag_;
    Scalar y_sq_norm_ = 0;
    Scalar y_inf_norm_ = 0;
};

using Signald = Signal<double>;

} // namespace l1atf
