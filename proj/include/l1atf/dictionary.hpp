#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l1atf/column.hpp"
#include "l1atf/error.hpp"

namespace l1atf {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Box constraint on the coefficients of one block. Zero is always feasible.
template <class Scalar>
struct Bounds {
    Scalar lower = -std::numeric_limits<Scalar>::infinity();
    Scalar upper = std::numeric_limits<Scalar>::infinity();

    bool is_free() const { return std::isinf(lower) && std::isinf(upper); }
    Scalar clamp(Scalar v) const { return std::clamp(v, lower, upper); }

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Implicit description of the dictionary A = [slope step spike sine cosine].
template <class Scalar>
struct DictionarySpec {
    std::size_t n = 0;
    std::vector<Scalar> omega;  // radians/sample, strictly increasing in (0, pi]
    BlockSet enabled = BlockSet::all();
    std::map<BlockKind, Bounds<Scalar>> bounds;

    void validate() const
    {
        if (n < 3)
            throw UsageError("signal length must be at least 3, got " + std::to_string(n));
        const Scalar pi = std::numbers::pi_v<Scalar>;
        for (std::size_t k = 0; k < omega.size(); ++k) {
            const Scalar w = omega[k];
            if (!(w > Scalar(0)) || w > pi * (Scalar(1) + 4 * std::numeric_limits<Scalar>::epsilon()))
                throw UsageError("frequency " + std::to_string(double(w)) + " outside (0, pi]");
            if (k > 0 && !(w > omega[k - 1]))
                throw UsageError("frequencies must be strictly increasing");
        }
        for (const auto& [kind, b] : bounds) {
            if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > Scalar(0) || b.upper < Scalar(0))
                throw UsageError("bounds for " + std::string(to_string(kind)) + " must satisfy lower <= 0 <= upper");
        }
    }
};

namespace detail {

// sum_{u=1}^{N} u
template <class Scalar>
Scalar power_sum1(Scalar N) { return N * (N + 1) / 2; }

// sum_{u=1}^{N} u^2
template <class Scalar>
Scalar power_sum2(Scalar N) { return N * (N + 1) * (2 * N + 1) / 6; }

// Reduce an angle to (-pi, pi]; e^{i a t} is unchanged for integer t.
template <class Scalar>
Scalar wrap_angle(Scalar a)
{
    const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    Scalar r = std::remainder(a, two_pi);
    if (r <= -std::numbers::pi_v<Scalar>) r += two_pi;
    return r;
}

// sum_{t=L}^{L+N-1} e^{i w t}, via the Dirichlet kernel.
template <class Scalar>
std::complex<Scalar> exp_sum(Scalar w, Scalar L, Scalar N)
{
    w = wrap_angle(w);
    if (std::abs(w) < 64 * std::numeric_limits<Scalar>::epsilon())
        return {N, Scalar(0)};
    const Scalar centre = L + (N - 1) / 2;
    const Scalar d = std::sin(N * w / 2) / std::sin(w / 2);
    return std::polar(d, w * centre);
}

// sum_{t=L}^{L+N-1} (t - shift) e^{i w t}, for w in (0, pi].
template <class Scalar>
std::complex<Scalar> ramp_exp_sum(Scalar w, Scalar L, Scalar N, Scalar shift)
{
    const Scalar centre = L + (N - 1) / 2;
    const Scalar sh = std::sin(w / 2);
    const Scalar ch = std::cos(w / 2);
    const Scalar sn = std::sin(N * w / 2);
    const Scalar cn = std::cos(N * w / 2);
    const Scalar d = sn / sh;
    const Scalar dprime = (N / 2 * cn * sh - sn * ch / 2) / (sh * sh);
    const std::complex<Scalar> phase = std::polar(Scalar(1), w * centre);
    return phase * std::complex<Scalar>((centre - shift) * d, -dprime);
}

} // namespace detail

/// The over-complete dictionary, never stored densely.
///
/// Column t-values (t = 0..n-1):
///   slope j   max(t - j, 0)
///   step j    1 if t > j
///   spike j   1 if t == j
///   sine k    sin(omega_k t)
///   cosine k  cos(omega_k t)
///
/// Every inner product between two columns is evaluated in O(1) from closed
/// forms. A sine column at omega = pi is identically zero and is left out.
template <class Scalar>
class Dictionary {
public:
    using scalar_type = Scalar;

    explicit Dictionary(DictionarySpec<Scalar> spec) : spec_(std::move(spec))
    {
        spec_.validate();
        build_columns();
        build_trig_table();
    }

    const DictionarySpec<Scalar>& spec() const { return spec_; }
    std::size_t n() const { return spec_.n; }
    std::size_t size() const { return columns_.size(); }
    const std::vector<ColumnId>& columns() const { return columns_; }
    const ColumnId& column(std::size_t flat) const { return columns_[flat]; }

    /// Number of columns the full dictionary has for this length and frequency list.
    static std::size_t full_size(std::size_t n, std::size_t n_freq) { return 3 * n - 2 + 2 * n_freq; }

    bool contains(const ColumnId& c) const
    {
        if (!spec_.enabled.contains(c.kind)) return false;
        switch (c.kind) {
        case BlockKind::Slope:
        case BlockKind::Step: return c.index + 2 <= spec_.n;
        case BlockKind::Spike: return c.index < spec_.n;
        case BlockKind::Sine: return c.index < spec_.omega.size() && !sine_vanishes(c.index);
        case BlockKind::Cosine: return c.index < spec_.omega.size();
        }
        return false;
    }

    void require(const ColumnId& c) const
    {
        if (!contains(c)) throw UsageError("column " + to_string(c) + " is not part of this dictionary");
    }

    /// Flat position of a column in canonical order.
    std::size_t index_of(const ColumnId& c) const
    {
        require(c);
        const auto& block = block_positions_[static_cast<std::size_t>(c.kind)];
        if (c.kind == BlockKind::Sine) return block.offset + sine_position_[c.index];
        return block.offset + c.index;
    }

    Bounds<Scalar> bounds(BlockKind kind) const
    {
        auto it = spec_.bounds.find(kind);
        return it == spec_.bounds.end() ? Bounds<Scalar>{} : it->second;
    }

    Scalar frequency(const ColumnId& c) const { return spec_.omega[c.index]; }

    /// A[t, c].
    Scalar value(const ColumnId& c, std::size_t t) const
    {
        require(c);
        if (t >= spec_.n) throw UsageError("sample index " + std::to_string(t) + " out of range");
        return value_unchecked(c, t);
    }

    Scalar value_unchecked(const ColumnId& c, std::size_t t) const
    {
        switch (c.kind) {
        case BlockKind::Slope: return t > c.index ? Scalar(t - c.index) : Scalar(0);
        case BlockKind::Step: return t > c.index ? Scalar(1) : Scalar(0);
        case BlockKind::Spike: return t == c.index ? Scalar(1) : Scalar(0);
        case BlockKind::Sine: return std::sin(spec_.omega[c.index] * Scalar(t));
        case BlockKind::Cosine: return std::cos(spec_.omega[c.index] * Scalar(t));
        }
        return Scalar(0);
    }

    /// Dense copy of one column (test oracle, reconstruction).
    Vector<Scalar> materialize(const ColumnId& c) const
    {
        require(c);
        Vector<Scalar> col(spec_.n);
        for (std::size_t t = 0; t < spec_.n; ++t) col[t] = value_unchecked(c, t);
        return col;
    }

    /// Dense n x p matrix. Only sensible for small n.
    Matrix<Scalar> materialize() const
    {
        Matrix<Scalar> a(spec_.n, size());
        for (std::size_t j = 0; j < size(); ++j) a.col(j) = materialize(columns_[j]);
        return a;
    }

    /// sum_t A[t, c].
    Scalar column_sum(const ColumnId& c) const
    {
        const Scalar m = Scalar(spec_.n - 1);
        switch (c.kind) {
        case BlockKind::Slope: return detail::power_sum1(m - Scalar(c.index));
        case BlockKind::Step: return m - Scalar(c.index);
        case BlockKind::Spike: return Scalar(1);
        case BlockKind::Sine: return detail::exp_sum(spec_.omega[c.index], Scalar(0), Scalar(spec_.n)).imag();
        case BlockKind::Cosine: return detail::exp_sum(spec_.omega[c.index], Scalar(0), Scalar(spec_.n)).real();
        }
        return Scalar(0);
    }

    /// <A_a, A_b> in O(1).
    Scalar gram(const ColumnId& a, const ColumnId& b) const
    {
        if (b.kind < a.kind) return gram_ordered(b, a);
        return gram_ordered(a, b);
    }

    Scalar gram(std::size_t a, std::size_t b) const { return gram(columns_[a], columns_[b]); }

private:
    struct BlockPosition {
        std::size_t offset = 0;
        std::size_t count = 0;
    };

    bool sine_vanishes(std::size_t k) const
    {
        const Scalar pi = std::numbers::pi_v<Scalar>;
        return std::abs(spec_.omega[k] - pi) <= 4 * std::numeric_limits<Scalar>::epsilon() * pi;
    }

    void build_columns()
    {
        const std::size_t n = spec_.n;
        const std::size_t nf = spec_.omega.size();
        sine_position_.assign(nf, 0);
        for (auto kind : all_block_kinds) {
            auto& block = block_positions_[static_cast<std::size_t>(kind)];
            block.offset = columns_.size();
            if (!spec_.enabled.contains(kind)) continue;
            std::size_t count = 0;
            switch (kind) {
            case BlockKind::Slope:
            case BlockKind::Step: count = n - 1; break;
            case BlockKind::Spike: count = n; break;
            case BlockKind::Sine:
            case BlockKind::Cosine: count = nf; break;
            }
            for (std::size_t i = 0; i < count; ++i) {
                if (kind == BlockKind::Sine) {
                    if (sine_vanishes(i)) continue;
                    sine_position_[i] = columns_.size() - block.offset;
                }
                columns_.push_back({kind, i});
            }
            block.count = columns_.size() - block.offset;
        }
    }

    // Trig-trig entries for all frequency pairs: [ss, sc, cs, cc].
    void build_trig_table()
    {
        const std::size_t nf = spec_.omega.size();
        trig_table_.assign(4 * nf * nf, Scalar(0));
        const Scalar n = Scalar(spec_.n);
        for (std::size_t k = 0; k < nf; ++k) {
            for (std::size_t l = 0; l < nf; ++l) {
                const Scalar wk = spec_.omega[k];
                const Scalar wl = spec_.omega[l];
                const auto diff = detail::exp_sum(wk - wl, Scalar(0), n);
                const auto sum = detail::exp_sum(wk + wl, Scalar(0), n);
                Scalar* e = &trig_table_[4 * (k * nf + l)];
                e[0] = (diff.real() - sum.real()) / 2;  // sin_k . sin_l
                e[1] = (sum.imag() + diff.imag()) / 2;  // sin_k . cos_l
                e[2] = (sum.imag() - diff.imag()) / 2;  // cos_k . sin_l
                e[3] = (diff.real() + sum.real()) / 2;  // cos_k . cos_l
            }
        }
    }

    // Requires a.kind <= b.kind.
    Scalar gram_ordered(const ColumnId& a, const ColumnId& b) const
    {
        const Scalar m = Scalar(spec_.n - 1);
        const std::size_t ai = a.index;
        const std::size_t bi = b.index;
        switch (a.kind) {
        case BlockKind::Slope:
            switch (b.kind) {
            case BlockKind::Slope: {
                const std::size_t c = std::max(ai, bi);
                const Scalar N = m - Scalar(c);
                const Scalar d1 = Scalar(c - ai);
                const Scalar d2 = Scalar(c - bi);
                return detail::power_sum2(N) + (d1 + d2) * detail::power_sum1(N) + d1 * d2 * N;
            }
            case BlockKind::Step: {
                const std::size_t c = std::max(ai, bi);
                const Scalar N = m - Scalar(c);
                return detail::power_sum1(N) + Scalar(c - ai) * N;
            }
            case BlockKind::Spike: return bi > ai ? Scalar(bi - ai) : Scalar(0);
            case BlockKind::Sine:
            case BlockKind::Cosine: {
                const auto z = detail::ramp_exp_sum(spec_.omega[bi], Scalar(ai + 1), m - Scalar(ai), Scalar(ai));
                return b.kind == BlockKind::Sine ? z.imag() : z.real();
            }
            }
            break;
        case BlockKind::Step:
            switch (b.kind) {
            case BlockKind::Step: return m - Scalar(std::max(ai, bi));
            case BlockKind::Spike: return bi > ai ? Scalar(1) : Scalar(0);
            case BlockKind::Sine:
            case BlockKind::Cosine: {
                const auto z = detail::exp_sum(spec_.omega[bi], Scalar(ai + 1), m - Scalar(ai));
                return b.kind == BlockKind::Sine ? z.imag() : z.real();
            }
            default: break;
            }
            break;
        case BlockKind::Spike:
            switch (b.kind) {
            case BlockKind::Spike: return ai == bi ? Scalar(1) : Scalar(0);
            case BlockKind::Sine: return std::sin(spec_.omega[bi] * Scalar(ai));
            case BlockKind::Cosine: return std::cos(spec_.omega[bi] * Scalar(ai));
            default: break;
            }
            break;
        case BlockKind::Sine:
        case BlockKind::Cosine: {
            const std::size_t nf = spec_.omega.size();
            const std::size_t slot = (a.kind == BlockKind::Sine ? 0 : 2) + (b.kind == BlockKind::Sine ? 0 : 1);
            return trig_table_[4 * (ai * nf + bi) + slot];
        }
        }
        return Scalar(0);
    }

    DictionarySpec<Scalar> spec_;
    std::vector<ColumnId> columns_;
    std::array<BlockPosition, 5> block_positions_{};
    std::vector<std::size_t> sine_position_;
    std::vector<Scalar> trig_table_;
};

/// Inner products of every dictionary column with one signal.
///
/// Setup is O(n (1 + |omega|)); each query afterwards is a lookup.
template <class Scalar>
class SignalProjection {
public:
    SignalProjection(const Dictionary<Scalar>& dict, std::span<const Scalar> y) : dict_(&dict)
    {
        const std::size_t n = dict.n();
        if (y.size() != n)
            throw UsageError("signal length " + std::to_string(y.size()) + " does not match dictionary length " +
                             std::to_string(n));
        // suffix[k] = sum_{t >= k} y_t ; ramp[j] = sum_{t > j} (t - j) y_t
        std::vector<Scalar> suffix(n + 1, Scalar(0));
        for (std::size_t t = n; t-- > 0;) suffix[t] = suffix[t + 1] + y[t];
        std::vector<Scalar> ramp(n, Scalar(0));
        for (std::size_t j = n - 1; j-- > 0;) ramp[j] = ramp[j + 1] + suffix[j + 1];

        dots_.resize(static_cast<Eigen::Index>(dict.size()));
        std::vector<Scalar> sin_dot(dict.spec().omega.size(), Scalar(0));
        std::vector<Scalar> cos_dot(dict.spec().omega.size(), Scalar(0));
        for (std::size_t k = 0; k < dict.spec().omega.size(); ++k) {
            const Scalar w = dict.spec().omega[k];
            Scalar s = 0, c = 0;
            for (std::size_t t = 0; t < n; ++t) {
                s += std::sin(w * Scalar(t)) * y[t];
                c += std::cos(w * Scalar(t)) * y[t];
            }
            sin_dot[k] = s;
            cos_dot[k] = c;
        }
        for (std::size_t i = 0; i < dict.size(); ++i) {
            const ColumnId& col = dict.column(i);
            Scalar v = 0;
            switch (col.kind) {
            case BlockKind::Slope: v = ramp[col.index]; break;
            case BlockKind::Step: v = suffix[col.index + 1]; break;
            case BlockKind::Spike: v = y[col.index]; break;
            case BlockKind::Sine: v = sin_dot[col.index]; break;
            case BlockKind::Cosine: v = cos_dot[col.index]; break;
            }
            dots_[static_cast<Eigen::Index>(i)] = v;
        }
    }

    Scalar dot(const ColumnId& c) const { return dots_[static_cast<Eigen::Index>(dict_->index_of(c))]; }
    Scalar dot(std::size_t flat) const { return dots_[static_cast<Eigen::Index>(flat)]; }
    const Vector<Scalar>& dots() const { return dots_; }

private:
    const Dictionary<Scalar>* dict_;
    Vector<Scalar> dots_;
};

/// <A_c, y>. Builds a one-off projection; reuse SignalProjection for repeated queries.
template <class Scalar>
Scalar column_dot_signal(const Dictionary<Scalar>& dict, const ColumnId& c, std::span<const Scalar> y)
{
    return SignalProjection<Scalar>(dict, y).dot(c);
}

using DictionarySpecd = DictionarySpec<double>;
using Dictionaryd = Dictionary<double>;

} // namespace l1atf
