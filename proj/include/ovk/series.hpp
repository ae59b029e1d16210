#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ovk/errors.hpp"

namespace ovk {

/// Scale parameter of the weighted family of spaces.  Only the open interval
/// (0,1) is admissible: both endpoints make the existence bounds degenerate,
/// so they are rejected at construction instead of surfacing as NaNs later.
class ScaleIndex {
public:
    explicit ScaleIndex(double s) : s_(s) {
        if (!(s > 0.0) || !(s < 1.0)) {
            throw DomainError("scale index must lie in (0,1), got " + std::to_string(s));
        }
    }

    double value() const noexcept { return s_; }

    friend bool operator==(ScaleIndex a, ScaleIndex b) noexcept { return a.s_ == b.s_; }
    friend bool operator<(ScaleIndex a, ScaleIndex b) noexcept { return a.s_ < b.s_; }
    friend bool operator<=(ScaleIndex a, ScaleIndex b) noexcept { return a.s_ <= b.s_; }

private:
    double s_;
};

/// Polynomial u(x) = sum_k c_k x^k with real coefficients, the concrete
/// representative of an analytic element.  The coefficient vector is never
/// empty (the zero series stores a single 0).  `truncated` records that a
/// degree cap discarded nonzero coefficients somewhere in the history of the
/// value, so downstream consumers can tell an exact result from a capped one.
class PowerSeries {
public:
    PowerSeries() : c_{0.0} {}

    explicit PowerSeries(std::vector<double> coeffs, bool truncated = false)
        : c_(std::move(coeffs)), truncated_(truncated) {
        if (c_.empty()) c_.push_back(0.0);
    }

    static PowerSeries constant(double v) { return PowerSeries({v}); }

    static PowerSeries monomial(std::size_t k, double coeff = 1.0) {
        std::vector<double> c(k + 1, 0.0);
        c[k] = coeff;
        return PowerSeries(std::move(c));
    }

    std::size_t degree() const noexcept { return c_.size() - 1; }

    double coefficient(std::size_t k) const noexcept {
        return k < c_.size() ? c_[k] : 0.0;
    }

    const std::vector<double>& coefficients() const noexcept { return c_; }

    bool truncated() const noexcept { return truncated_; }

    bool is_zero() const noexcept {
        return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
    }

    /// Value equality: equal coefficient functions.  Trailing zeros and the
    /// truncation flag do not participate.
    friend bool operator==(const PowerSeries& a, const PowerSeries& b) noexcept {
        const std::size_t n = std::max(a.c_.size(), b.c_.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (a.coefficient(k) != b.coefficient(k)) return false;
        }
        return true;
    }
    friend bool operator!=(const PowerSeries& a, const PowerSeries& b) noexcept {
        return !(a == b);
    }

private:
    std::vector<double> c_;
    bool truncated_ = false;
};

inline constexpr std::size_t no_degree_cap = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

namespace detail {

// Neumaier (improved Kahan) compensated accumulator.  All terms fed to the
// norm are nonnegative and the weights s^k are built by iterated
// multiplication, so the computed norm is monotone in s not just up to
// rounding but exactly: every intermediate of the s'-evaluation dominates the
// corresponding intermediate of the s-evaluation, and the compensation term
// is orders of magnitude below the smallest gap the samplers can produce.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

/// Weighted coefficient norm  sum_k |c_k| s^k.
inline double norm(const PowerSeries& u, ScaleIndex s) {
    detail::NeumaierSum acc;
    double p = 1.0;
    for (double c : u.coefficients()) {
        acc.add(std::abs(c) * p);
        p *= s.value();
    }
    return acc.value();
}

inline double norm(const PowerSeries& u, double s) { return norm(u, ScaleIndex(s)); }

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

inline PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    std::vector<double> c(std::max(a.degree(), b.degree()) + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] = a.coefficient(k) + b.coefficient(k);
    }
    return PowerSeries(std::move(c), a.truncated() || b.truncated());
}

inline PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
    std::vector<double> c(std::max(a.degree(), b.degree()) + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] = a.coefficient(k) - b.coefficient(k);
    }
    return PowerSeries(std::move(c), a.truncated() || b.truncated());
}

inline PowerSeries operator-(const PowerSeries& a) {
    std::vector<double> c(a.coefficients());
    for (double& v : c) v = -v;
    return PowerSeries(std::move(c), a.truncated());
}

inline PowerSeries operator*(double lambda, const PowerSeries& a) {
    std::vector<double> c(a.coefficients());
    for (double& v : c) v *= lambda;
    return PowerSeries(std::move(c), a.truncated());
}

inline PowerSeries operator*(const PowerSeries& a, double lambda) { return lambda * a; }

/// Termwise derivative d/dx.
inline PowerSeries derivative(const PowerSeries& u) {
    if (u.degree() == 0) return PowerSeries({0.0}, u.truncated());
    std::vector<double> c(u.degree(), 0.0);
    for (std::size_t k = 1; k <= u.degree(); ++k) {
        c[k - 1] = static_cast<double>(k) * u.coefficient(k);
    }
    return PowerSeries(std::move(c), u.truncated());
}

/// Termwise antiderivative with zero constant term.
inline PowerSeries antiderivative(const PowerSeries& u) {
    std::vector<double> c(u.degree() + 2, 0.0);
    for (std::size_t k = 0; k <= u.degree(); ++k) {
        c[k + 1] = u.coefficient(k) / static_cast<double>(k + 1);
    }
    return PowerSeries(std::move(c), u.truncated());
}

/// Cauchy product; degrees above `max_degree` are dropped and, when any
/// dropped convolution coefficient is nonzero, the result is marked truncated.
inline PowerSeries cauchy_product(const PowerSeries& a, const PowerSeries& b,
                                  std::size_t max_degree = no_degree_cap) {
    const std::size_t full = a.degree() + b.degree();
    const std::size_t top = std::min(full, max_degree);
    std::vector<double> c(top + 1, 0.0);
    bool dropped = false;
    for (std::size_t i = 0; i <= a.degree(); ++i) {
        const double ai = a.coefficient(i);
        if (ai == 0.0) continue;
        for (std::size_t j = 0; j <= b.degree(); ++j) {
            const double prod = ai * b.coefficient(j);
            if (prod == 0.0) continue;
            if (i + j <= top) {
                c[i + j] += prod;
            } else {
                dropped = true;
            }
        }
    }
    return PowerSeries(std::move(c), a.truncated() || b.truncated() || dropped);
}

inline PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    return cauchy_product(a, b);
}

/// Keep degrees 0..N.  The flag is set only when a nonzero coefficient is
/// actually discarded (capping an already short series is lossless).
inline PowerSeries truncate(const PowerSeries& u, std::size_t N) {
    if (u.degree() <= N) return u;
    bool dropped = false;
    for (std::size_t k = N + 1; k <= u.degree(); ++k) {
        if (u.coefficient(k) != 0.0) {
            dropped = true;
            break;
        }
    }
    std::vector<double> c(u.coefficients().begin(), u.coefficients().begin() + N + 1);
    return PowerSeries(std::move(c), u.truncated() || dropped);
}

/// G(x) -> G(x + t) by synthetic (Horner) shift: O(n^2) fused update loop,
/// avoids the huge binomial coefficients of the naive formula.
inline PowerSeries taylor_shift(const PowerSeries& g, double t) {
    std::vector<double> c(g.coefficients());
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = n - 1; k-- > i;) {
            c[k] += t * c[k + 1];
        }
    }
    return PowerSeries(std::move(c), g.truncated());
}

}  // namespace ovk
