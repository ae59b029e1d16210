#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ovk/errors.hpp"
#include "ovk/expr.hpp"
#include "ovk/random.hpp"
#include "ovk/series.hpp"

namespace ovk {

// ===========================================================================
// Constant estimation
//
// The existence machinery needs two numbers for a given problem: M, the
// factor in the scale-regularity bound  ||A(t,u,v)||_s <= M ||v||_{s+d} / d,
// and K, a uniform bound on the source term over the ball.  For trees in a
// recognized normal form both have closed-form values; for everything else we
// sample.  The sampler also doubles as a diagnostic: if the per-delta maxima
// of  d ||A|| / ||v||  grow as the gap d shrinks, no finite M exists and the
// problem is outside the method's scope (second-order terms show up this way,
// with the maxima growing like 1/d).
// ===========================================================================

/// Where and how densely the estimators sample.  The defaults deliberately
/// include scale values very close to both endpoints: the extremal ratios for
/// first-order terms live at s -> 1, and the small-s values are what separates
/// a genuine 1/d divergence from a plateau when the ladder is probed.
struct SamplingPlan {
    std::vector<double> s_values;
    std::vector<double> deltas;   ///< gap ladder, decreasing
    std::vector<double> t_values;
    std::size_t monomial_degree = 64;
    std::size_t random_v = 100;
    std::size_t random_u = 8;
    double time_horizon = 1.0;
    std::uint64_t seed = 0;

    static SamplingPlan defaults(std::size_t truncation_degree,
                                 double time_horizon = 1.0, std::uint64_t seed = 0) {
        SamplingPlan plan;
        plan.s_values = {0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                         0.6,   0.7,  0.8,  0.9, 0.95, 0.99};
        plan.deltas = {0.2, 0.1, 0.05, 0.025};
        plan.t_values = {0.0, 0.5 * time_horizon, time_horizon};
        plan.monomial_degree = truncation_degree;
        plan.time_horizon = time_horizon;
        plan.seed = seed;
        return plan;
    }

    void validate() const {
        if (s_values.empty()) throw ConfigError("sampling plan: no scale values");
        if (deltas.empty()) throw ConfigError("sampling plan: no gap ladder");
        if (t_values.empty()) throw ConfigError("sampling plan: no time samples");
        for (double s : s_values) {
            if (!(s > 0.0) || !(s < 1.0)) {
                throw ConfigError("sampling plan: scale value outside (0,1)");
            }
        }
        for (double d : deltas) {
            if (!(d > 0.0) || !(d < 1.0)) {
                throw ConfigError("sampling plan: gap outside (0,1)");
            }
        }
        if (!(time_horizon >= 0.0)) {
            throw ConfigError("sampling plan: negative time horizon");
        }
    }
};

struct ConstantsEstimate {
    double M_est = 0.0;
    double K_est = 0.0;
    std::optional<double> M_analytic;
    std::optional<double> K_analytic;
    /// (delta, max ratio over the sample set at that delta), ladder order.
    std::vector<std::pair<double, double>> per_delta;
    /// Log-log slope of per_delta when the ladder has >= 3 usable rungs.
    std::optional<double> ladder_slope;
    /// Set iff the ladder slope indicates blowup as the gap shrinks.
    std::optional<double> divergence_slope;
    std::string grid_note;
};

struct ConvexityReport {
    double max_violation = 0.0;  ///< max of ||A(.,lam v + (1-lam) w)|| - lam||A v|| - (1-lam)||A w||
    double worst_lambda = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool structurally_linear = false;
};

// If the per-delta maxima fall faster than this on the log-log ladder, the
// operator is treated as losing more than one derivative's worth of scale.
inline constexpr double divergence_slope_threshold = -0.5;

// ---------------------------------------------------------------------------
// Analytic recognizers
// ---------------------------------------------------------------------------

/// Supremum of ||e(t,u,v)||_s over s < 1, both arguments in the closed ball
/// of radius R, and t in [0, T] — when the tree shape admits one.  Derivative
/// nodes never do: d/dx is unbounded on any single space of the family.
inline std::optional<double> analytic_ball_bound(const ExprPtr& e, double R, double T) {
    if (!e) throw StructuralError("analytic_ball_bound: empty expression");
    switch (e->kind()) {
        case ExprKind::Constant: {
            double sum = 0.0;
            for (double c : e->value().coefficients()) sum += std::abs(c);
            return sum;
        }
        case ExprKind::ArgU:
        case ExprKind::ArgV:
            return R;
        case ExprKind::Derivative:
            return std::nullopt;
        case ExprKind::Sum: {
            auto l = analytic_ball_bound(e->lhs(), R, T);
            auto r = analytic_ball_bound(e->rhs(), R, T);
            if (l && r) return *l + *r;
            return std::nullopt;
        }
        case ExprKind::Product: {
            auto l = analytic_ball_bound(e->lhs(), R, T);
            auto r = analytic_ball_bound(e->rhs(), R, T);
            if (l && r) return *l * *r;
            return std::nullopt;
        }
        case ExprKind::TimeScale: {
            auto c = analytic_ball_bound(e->child(), R, T);
            if (!c) return std::nullopt;
            double pb = 0.0, tp = 1.0;
            for (double p : e->poly()) {
                pb += std::abs(p) * tp;
                tp *= T;
            }
            return pb * *c;
        }
    }
    return std::nullopt;
}

namespace detail {

inline bool provably_zero(const ExprPtr& e) {
    if (e->contains_u() || e->contains_v() || e->contains_time()) return false;
    return evaluate(e, 0.0, PowerSeries{}, PowerSeries{}).is_zero();
}

}  // namespace detail

/// Closed-form M for trees in quasilinear normal form: combinations of
/// dx(arg_v) and arg_v with v-free bounded factors.  The atom dx(arg_v)
/// carries the sharp constant 1 — the monomial certificate
/// d k s^(k-1) <= (s+d)^k, a two-term binomial underestimate — and arg_v
/// alone costs 1 as well since d < 1 on the admissible gap range.
inline std::optional<double> analytic_operator_bound(const ExprPtr& e, double R, double T) {
    if (!e) throw StructuralError("analytic_operator_bound: empty expression");
    if (!e->contains_v()) {
        if (detail::provably_zero(e)) return 0.0;
        return std::nullopt;  // nonzero v-free parts belong in the source term
    }
    switch (e->kind()) {
        case ExprKind::ArgV:
            return 1.0;
        case ExprKind::Derivative:
            if (e->child()->kind() == ExprKind::ArgV) return 1.0;
            return std::nullopt;
        case ExprKind::Product: {
            if (!e->lhs()->contains_v()) {
                auto f = analytic_ball_bound(e->lhs(), R, T);
                auto c = analytic_operator_bound(e->rhs(), R, T);
                if (f && c) return *f * *c;
                return std::nullopt;
            }
            if (!e->rhs()->contains_v()) {
                auto f = analytic_ball_bound(e->rhs(), R, T);
                auto c = analytic_operator_bound(e->lhs(), R, T);
                if (f && c) return *f * *c;
                return std::nullopt;
            }
            return std::nullopt;  // genuinely quadratic in v
        }
        case ExprKind::Sum: {
            auto l = analytic_operator_bound(e->lhs(), R, T);
            auto r = analytic_operator_bound(e->rhs(), R, T);
            if (l && r) return *l + *r;
            return std::nullopt;
        }
        case ExprKind::TimeScale: {
            auto c = analytic_operator_bound(e->child(), R, T);
            if (!c) return std::nullopt;
            double pb = 0.0, tp = 1.0;
            for (double p : e->poly()) {
                pb += std::abs(p) * tp;
                tp *= T;
            }
            return pb * *c;
        }
        default:
            return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Sampling machinery
// ---------------------------------------------------------------------------

namespace detail {

inline PowerSeries random_series(Rng& rng, std::size_t degree) {
    std::vector<double> c(degree + 1);
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    return PowerSeries(std::move(c));
}

/// Scale u so that ||u||_s is exactly the computed target; zero stays zero.
inline PowerSeries scaled_to(const PowerSeries& u, double target, ScaleIndex s) {
    const double n = norm(u, s);
    if (n == 0.0) return u;
    return (target / n) * u;
}

/// Least-squares slope of log(y) against log(x); needs >= 2 strictly
/// positive samples with distinct abscissae.
inline std::optional<double> fit_loglog_slope(
    const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::pair<double, double>> logs;
    for (auto [x, y] : pts) {
        if (x > 0.0 && y > 0.0) logs.emplace_back(std::log(x), std::log(y));
    }
    if (logs.size() < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : logs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(logs.size());
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / den;
}

}  // namespace detail

/// Sample the ratio  d ||A(t,u,v)||_s / ||v||_{s+d}  over the plan's grid,
/// with v running over scaled monomials (the extremizers for derivative-type
/// operators) plus seeded random ball elements, and u over a small set of
/// ball representatives.  Returns the overall maximum together with the
/// per-delta profile and its log-log slope.
inline ConstantsEstimate estimate_M(const ProblemSpec& p, const SamplingPlan& plan) {
    plan.validate();
    Rng rng(plan.seed);

    // Raw shapes (unscaled); normalization to the ball happens per (s, d).
    std::vector<PowerSeries> v_shapes;
    v_shapes.reserve(plan.monomial_degree + 1 + plan.random_v);
    for (std::size_t k = 0; k <= plan.monomial_degree; ++k) {
        v_shapes.push_back(PowerSeries::monomial(k));
    }
    const std::size_t n_monomial_v = v_shapes.size();
    for (std::size_t i = 0; i < plan.random_v; ++i) {
        v_shapes.push_back(detail::random_series(rng, plan.monomial_degree));
    }

    std::vector<PowerSeries> u_shapes;
    u_shapes.push_back(PowerSeries{});  // zero: the base point of the iteration
    u_shapes.push_back(PowerSeries::constant(1.0));
    for (std::size_t k = 1; k <= 4; ++k) u_shapes.push_back(PowerSeries::monomial(k));
    for (std::size_t i = 0; i < plan.random_u; ++i) {
        u_shapes.push_back(detail::random_series(rng, std::min<std::size_t>(
                                                          plan.monomial_degree, 16)));
    }

    const std::vector<double> times =
        p.A->contains_time() ? plan.t_values : std::vector<double>{0.0};

    ConstantsEstimate out;
    double best = 0.0, best_s = 0.0, best_d = 0.0, best_t = 0.0;

    for (double d : plan.deltas) {
        double delta_max = 0.0;
        for (double s_val : plan.s_values) {
            if (!(s_val + d < 1.0)) continue;
            const ScaleIndex s(s_val);
            const ScaleIndex s_up(s_val + d);

            std::vector<PowerSeries> u_ball;
            u_ball.reserve(u_shapes.size());
            for (const auto& u : u_shapes) {
                u_ball.push_back(detail::scaled_to(u, p.R, s_up));
            }

            for (std::size_t vi = 0; vi < v_shapes.size(); ++vi) {
                const PowerSeries v = detail::scaled_to(v_shapes[vi], p.R, s_up);
                const double vn = norm(v, s_up);
                if (vn == 0.0) continue;

                // Full u-sweep for the monomial extremizers; random shapes
                // only guard against structural surprises, so three base
                // points each is plenty.
                const std::size_t u_count =
                    vi < n_monomial_v ? u_ball.size() : std::min<std::size_t>(3, u_ball.size());
                for (std::size_t ui = 0; ui < u_count; ++ui) {
                    for (double t : times) {
                        const PowerSeries w = evaluate_A(p, t, u_ball[ui], v);
                        const double ratio = d * norm(w, s) / vn;
                        if (ratio > delta_max) delta_max = ratio;
                        if (ratio > best) {
                            best = ratio;
                            best_s = s_val;
                            best_d = d;
                            best_t = t;
                        }
                    }
                }
            }
        }
        out.per_delta.emplace_back(d, delta_max);
    }

    out.M_est = best;
    out.M_analytic = analytic_operator_bound(p.A, p.R, plan.time_horizon);
    out.K_analytic = analytic_ball_bound(p.h, p.R, plan.time_horizon);
    out.ladder_slope = detail::fit_loglog_slope(out.per_delta);
    if (out.ladder_slope && *out.ladder_slope < divergence_slope_threshold) {
        out.divergence_slope = out.ladder_slope;
    }

    std::ostringstream note;
    note << "max ratio " << best << " at s = " << best_s << ", delta = " << best_d
         << ", t = " << best_t;
    out.grid_note = note.str();
    return out;
}

/// Sample ||h(t,u)||_s over the plan's scale lattice with u in the ball of
/// radius R.  The extremal s sits at the top of the lattice whenever h is a
/// fixed series, so the lattice deliberately reaches 0.99.
inline ConstantsEstimate estimate_K(const ProblemSpec& p, const SamplingPlan& plan) {
    plan.validate();
    Rng rng(plan.seed);

    std::vector<PowerSeries> u_shapes;
    u_shapes.push_back(PowerSeries{});
    u_shapes.push_back(PowerSeries::constant(1.0));
    for (std::size_t k = 1; k <= 4; ++k) u_shapes.push_back(PowerSeries::monomial(k));
    for (std::size_t i = 0; i < plan.random_u; ++i) {
        u_shapes.push_back(detail::random_series(rng, std::min<std::size_t>(
                                                          plan.monomial_degree, 16)));
    }

    const std::vector<double> times =
        p.h->contains_time() ? plan.t_values : std::vector<double>{0.0};

    ConstantsEstimate out;
    double best = 0.0, best_s = 0.0, best_t = 0.0;
    for (double s_val : plan.s_values) {
        const ScaleIndex s(s_val);
        for (const auto& u_raw : u_shapes) {
            const PowerSeries u = detail::scaled_to(u_raw, p.R, s);
            for (double t : times) {
                const double k_cand = norm(evaluate_h(p, t, u), s);
                if (k_cand > best) {
                    best = k_cand;
                    best_s = s_val;
                    best_t = t;
                }
            }
        }
    }

    out.K_est = best;
    out.K_analytic = analytic_ball_bound(p.h, p.R, plan.time_horizon);
    out.M_analytic = analytic_operator_bound(p.A, p.R, plan.time_horizon);

    std::ostringstream note;
    note << "max source norm " << best << " at s = " << best_s << ", t = " << best_t;
    out.grid_note = note.str();
    return out;
}

/// Probe convexity of  v -> ||A(t, u, v)||_s  on the ball by random chords.
/// For trees affine in the second slot this is a theorem (norm of an affine
/// map), so the report also carries the structural certificate; the sampled
/// max violation should then be at most rounding noise.
inline ConvexityReport check_convexity(const ProblemSpec& p, std::size_t samples,
                                       std::uint64_t seed) {
    if (samples == 0) throw ConfigError("check_convexity: need at least one sample");
    Rng rng(seed);
    ConvexityReport rep;
    rep.samples = samples;
    rep.seed = seed;
    rep.structurally_linear = p.A->linear_in_v();
    rep.max_violation = -std::numeric_limits<double>::infinity();

    const std::size_t deg = std::min<std::size_t>(p.N, 12);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        const ScaleIndex s(rng.uniform(0.05, 0.95));
        const double lambda = rng.uniform();
        const PowerSeries u =
            detail::scaled_to(detail::random_series(rng, deg), rng.uniform() * p.R, s);
        const PowerSeries v =
            detail::scaled_to(detail::random_series(rng, deg), rng.uniform() * p.R, s);
        const PowerSeries w =
            detail::scaled_to(detail::random_series(rng, deg), rng.uniform() * p.R, s);

        const PowerSeries mix = lambda * v + (1.0 - lambda) * w;
        const double lhs = norm(evaluate_A(p, t, u, mix), s);
        const double rhs = lambda * norm(evaluate_A(p, t, u, v), s) +
                           (1.0 - lambda) * norm(evaluate_A(p, t, u, w), s);
        const double viol = lhs - rhs;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.worst_lambda = lambda;
        }
    }
    return rep;
}

}  // namespace ovk
