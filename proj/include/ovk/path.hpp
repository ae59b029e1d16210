#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ovk/errors.hpp"
#include "ovk/frame.hpp"
#include "ovk/random.hpp"
#include "ovk/series.hpp"

namespace ovk {

/// A time-discretized curve t -> u(t) in the scale: values on a strictly
/// increasing grid starting at 0.  Between nodes the curve is understood as
/// linear interpolation of coefficients.  Paths are plain data — nothing here
/// enforces u(0) = 0, because the same type carries solver iterates (which do
/// start at zero) and probe curves for the invariant-set checks (which on
/// purpose do not).
class ScalePath {
public:
    ScalePath(std::vector<double> times, std::vector<PowerSeries> values)
        : times_(std::move(times)), values_(std::move(values)) {
        if (times_.empty() || times_.size() != values_.size()) {
            throw DomainError("path: times and values must be nonempty and aligned");
        }
        if (times_.front() != 0.0) {
            throw DomainError("path: time grid must start at 0");
        }
        for (std::size_t i = 1; i < times_.size(); ++i) {
            if (!(times_[i] > times_[i - 1])) {
                throw DomainError("path: time grid must be strictly increasing");
            }
        }
    }

    static ScalePath zero(std::vector<double> times) {
        std::vector<PowerSeries> vals(times.size());
        return ScalePath(std::move(times), std::move(vals));
    }

    static ScalePath constant(std::vector<double> times, const PowerSeries& value) {
        std::vector<PowerSeries> vals(times.size(), value);
        return ScalePath(std::move(times), std::move(vals));
    }

    std::size_t size() const noexcept { return times_.size(); }
    double time(std::size_t i) const { return times_.at(i); }
    const PowerSeries& value(std::size_t i) const { return values_.at(i); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<PowerSeries>& values() const noexcept { return values_; }
    double final_time() const noexcept { return times_.back(); }

    bool starts_at_zero() const noexcept { return values_.front().is_zero(); }

    /// Value at an arbitrary time in [0, final], linear in the coefficients.
    PowerSeries value_at(double t) const {
        if (t < 0.0 || t > times_.back()) {
            throw DomainError("path: evaluation time outside the grid");
        }
        auto it = std::lower_bound(times_.begin(), times_.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
        if (hi == 0 || times_[hi] == t) return values_[hi];
        const std::size_t lo = hi - 1;
        const double lam = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return (1.0 - lam) * values_[lo] + lam * values_[hi];
    }

private:
    std::vector<double> times_;
    std::vector<PowerSeries> values_;
};

/// Uniform grid 0, tau/steps, ..., tau.
inline std::vector<double> uniform_times(double tau, std::size_t steps) {
    if (!(tau > 0.0)) throw DomainError("uniform_times: horizon must be positive");
    if (steps == 0) throw DomainError("uniform_times: need at least one step");
    std::vector<double> t(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        t[i] = tau * static_cast<double>(i) / static_cast<double>(steps);
    }
    return t;
}

/// Running-sup seminorm  max over grid times <= tau of ||u(t)||_s.
/// Monotone in both tau (larger max set) and s (termwise norm monotonicity).
inline double seminorm(const ScalePath& u, double tau, ScaleIndex s) {
    if (tau < 0.0) throw DomainError("seminorm: negative horizon");
    double m = 0.0;
    for (std::size_t i = 0; i < u.size() && u.time(i) <= tau; ++i) {
        m = std::max(m, norm(u.value(i), s));
    }
    return m;
}

/// Nodewise difference of two paths on the identical time grid.
inline ScalePath path_difference(const ScalePath& a, const ScalePath& b) {
    if (a.times() != b.times()) {
        throw DomainError("path difference: time grids differ");
    }
    std::vector<PowerSeries> vals;
    vals.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        vals.push_back(a.value(i) - b.value(i));
    }
    return ScalePath(a.times(), std::move(vals));
}

// ===========================================================================
// Seminorm grids
// ===========================================================================

/// A finite family of (tau, s) monitoring points, all kept at least `theta`
/// below the hypotenuse of a frame's triangle:  1 - s - a tau >= theta.
/// Every invariant-set verdict and every residual in the solver is reported
/// against such a grid.
class SeminormGrid {
public:
    struct Point {
        double tau;
        double s;
    };

    SeminormGrid(const ExistenceFrame& frame, std::vector<Point> points, double theta)
        : points_(std::move(points)), theta_(theta) {
        if (!(theta > 0.0) || !(theta < 1.0)) {
            throw ConfigError("seminorm grid: margin must lie in (0,1)");
        }
        if (points_.empty()) throw ConfigError("seminorm grid: no points");
        for (const auto& pt : points_) {
            validate_point(frame, pt, theta_);
        }
        std::sort(points_.begin(), points_.end(), [](const Point& x, const Point& y) {
            return x.tau != y.tau ? x.tau < y.tau : x.s < y.s;
        });
    }

    /// Tensor grid: tau at n_tau uniform fractions of tau_cap, s on a fixed
    /// lattice, keeping only the admissible combinations.
    static SeminormGrid regular(const ExistenceFrame& frame, double theta,
                                double tau_cap, std::size_t n_tau, std::size_t n_s) {
        if (!(tau_cap > 0.0)) throw ConfigError("seminorm grid: horizon must be positive");
        if (n_tau == 0 || n_s == 0) throw ConfigError("seminorm grid: empty lattice");
        std::vector<Point> pts;
        for (std::size_t i = 1; i <= n_tau; ++i) {
            const double tau = tau_cap * static_cast<double>(i) / static_cast<double>(n_tau);
            for (std::size_t j = 0; j < n_s; ++j) {
                const double s =
                    n_s == 1 ? 0.5
                             : 0.05 + (0.9 - 0.05) * static_cast<double>(j) /
                                          static_cast<double>(n_s - 1);
                if (admissible(frame, tau, s, theta)) pts.push_back({tau, s});
            }
        }
        // Keep an eye on the frame's own base scale when the margin allows.
        if (admissible(frame, tau_cap, frame.base_s.value(), theta)) {
            pts.push_back({tau_cap, frame.base_s.value()});
        }
        dedupe(pts);
        if (pts.empty()) {
            throw ConfigError("seminorm grid: no admissible points under the margin");
        }
        return SeminormGrid(frame, std::move(pts), theta);
    }

    /// Seeded uniform sample of the margin-theta subtriangle.
    static SeminormGrid random(const ExistenceFrame& frame, double theta,
                               std::size_t count, std::uint64_t seed) {
        if (count == 0) throw ConfigError("seminorm grid: empty sample");
        if (!(theta > 0.0) || !(theta < 1.0)) {
            throw ConfigError("seminorm grid: margin must lie in (0,1)");
        }
        const double s_hi = 1.0 - theta - 0.005;
        if (!(s_hi > 0.01)) {
            throw ConfigError("seminorm grid: margin leaves no room to sample");
        }
        Rng rng(seed);
        std::vector<Point> pts;
        pts.reserve(count);
        std::size_t guard = 0;
        while (pts.size() < count) {
            if (++guard > 1000 * count) {
                throw ConfigError("seminorm grid: margin leaves no room to sample");
            }
            const double s = rng.uniform(0.01, s_hi);
            const double tau_hi = (1.0 - s - theta) / frame.a;
            if (!(tau_hi > 0.0)) continue;
            const double tau = rng.uniform(1e-3 * tau_hi, tau_hi);
            if (admissible(frame, tau, s, theta)) pts.push_back({tau, s});
        }
        return SeminormGrid(frame, std::move(pts), theta);
    }

    const std::vector<Point>& points() const noexcept { return points_; }
    double theta() const noexcept { return theta_; }
    double max_tau() const noexcept { return points_.back().tau; }

    /// Distinct scale values, ascending — norm caches key off these.
    std::vector<double> distinct_s() const {
        std::vector<double> s;
        s.reserve(points_.size());
        for (const auto& p : points_) s.push_back(p.s);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }

    /// Re-check every point against (possibly another frame's) triangle.
    void require_inside(const ExistenceFrame& frame) const {
        for (const auto& pt : points_) {
            validate_point(frame, pt, theta_);
        }
    }

private:
    static bool admissible(const ExistenceFrame& frame, double tau, double s,
                           double theta) {
        return tau > 0.0 && s > 0.0 && s < 1.0 &&
               frame.triangle_margin(tau, s) >= theta - 1e-12;
    }

    static void validate_point(const ExistenceFrame& frame, const Point& pt,
                               double theta) {
        if (!admissible(frame, pt.tau, pt.s, theta)) {
            throw DomainError("seminorm grid: point (tau = " + std::to_string(pt.tau) +
                              ", s = " + std::to_string(pt.s) +
                              ") violates the triangle margin");
        }
    }

    static void dedupe(std::vector<Point>& pts) {
        std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) {
            return x.tau != y.tau ? x.tau < y.tau : x.s < y.s;
        });
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](const Point& x, const Point& y) {
                                  return x.tau == y.tau && x.s == y.s;
                              }),
                  pts.end());
    }

    std::vector<Point> points_;
    double theta_;
};

}  // namespace ovk
