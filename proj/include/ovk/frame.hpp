#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "ovk/errors.hpp"
#include "ovk/series.hpp"

namespace ovk {

// 2^(5/2), the constant the contraction argument attaches to the singular
// part of the key integral bound.
inline constexpr double two_pow_5_2 = 5.65685424949238;

/// Drift coefficient  a = M (2^(5/2) + K)  of the existence triangle.  The
/// degenerate case M = 0 (no quasilinear part at all) still needs a positive
/// slope for the triangle to close, so it falls back to 1.
inline double compute_a(double M, double K) {
    if (M < 0.0 || K < 0.0) {
        throw DomainError("compute_a: constants must be nonnegative");
    }
    if (M == 0.0) return 1.0;
    return M * (two_pow_5_2 + K);
}

/// Width of the time interval the triangle admits at base scale s.
inline double tau_max(ScaleIndex s, double a) {
    if (!(a > 0.0)) throw DomainError("tau_max: drift coefficient must be positive");
    return (1.0 - s.value()) / a;
}

/// The data a single existence run is framed by: the two operator constants,
/// the ball radius, the base scale, and the derived drift a and lifetime.
/// An explicit a may be supplied to steepen the triangle (shorter lifetime,
/// fatter margins); anything below M (2^(5/2) + K) is rejected because the
/// key estimate is only proved from that slope upward.
struct ExistenceFrame {
    double M;
    double K;
    double R;
    ScaleIndex base_s;
    double a;
    double tau;  ///< tau_max at base_s

    ExistenceFrame(double M_, double K_, double R_, ScaleIndex s,
                   std::optional<double> a_override = std::nullopt)
        : M(M_), K(K_), R(R_), base_s(s), a(0.0), tau(0.0) {
        if (M < 0.0 || K < 0.0) {
            throw DomainError("existence frame: constants must be nonnegative");
        }
        if (!(R > 0.0)) throw DomainError("existence frame: ball radius must be positive");
        const double a_min = M * (two_pow_5_2 + K);
        a = a_override ? *a_override : compute_a(M, K);
        if (!(a > 0.0)) throw DomainError("existence frame: drift must be positive");
        if (a < a_min * (1.0 - 1e-12)) {
            throw DomainError("existence frame: drift a = " + std::to_string(a) +
                              " below the admissible minimum " + std::to_string(a_min));
        }
        tau = tau_max(base_s, a);
    }

    /// Height of the triangle above (t, s): positive inside, zero on the
    /// hypotenuse  1 - s - a t = 0.
    double triangle_margin(double t, double s) const noexcept {
        return 1.0 - s - a * t;
    }

    bool inside_triangle(double t, double s) const noexcept {
        return t >= 0.0 && s > 0.0 && s < 1.0 && triangle_margin(t, s) > 0.0;
    }
};

/// Closed-form majorant of the key integral:  M (2^(5/2) + K) / (a sqrt(1-at-s)),
/// which the choice of a collapses to  1 / sqrt(1 - a t - s).
inline double bound_kn(double t, ScaleIndex s, const ExistenceFrame& frame) {
    if (t < 0.0) throw DomainError("bound_kn: negative time");
    const double w = frame.triangle_margin(t, s.value());
    if (!(w > 0.0)) {
        throw DomainError("bound_kn: (t, s) outside the existence triangle");
    }
    return frame.M * (two_pow_5_2 + frame.K) / (frame.a * std::sqrt(w));
}

}  // namespace ovk
