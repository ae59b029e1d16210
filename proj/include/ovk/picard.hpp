#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ovk/errors.hpp"
#include "ovk/expr.hpp"
#include "ovk/frame.hpp"
#include "ovk/invariant_set.hpp"
#include "ovk/path.hpp"

namespace ovk {

// ===========================================================================
// Successive approximation
//
// The solution is constructed as the fixed point of
//
//     F(u)(t) = int_0^t  A(xi, u(xi), u(xi)) + h(xi, u(xi))  dxi,
//
// iterated from the zero curve (which always belongs to the invariant set).
// The integral is discretized by the cumulative composite trapezoid rule on
// a uniform grid; every iterate is checked against the invariant set and the
// iteration reports, rather than throws, when it stalls or escapes.
// ===========================================================================

struct RunConfig {
    double s = 0.5;          ///< base scale of the frame
    double tau_frac = 0.5;   ///< fraction of tau_max used as horizon
    double step = 0.0;       ///< max time step; 0 picks horizon/1000
    std::size_t max_iter = 25;
    double tol = 1e-10;      ///< residual target in the grid seminorms
    double theta = 0.1;      ///< triangle margin of the monitoring grid
    std::uint64_t seed = 0;
    bool collect_timings = false;  ///< off by default: keeps reports reproducible

    void validate() const {
        if (!(s > 0.0) || !(s < 1.0)) throw ConfigError("run config: s outside (0,1)");
        if (!(tau_frac > 0.0) || !(tau_frac < 1.0)) {
            throw ConfigError("run config: tau fraction outside (0,1)");
        }
        if (step < 0.0) throw ConfigError("run config: negative step");
        if (max_iter == 0) throw ConfigError("run config: need at least one iteration");
        if (!(tol > 0.0)) throw ConfigError("run config: tolerance must be positive");
        if (!(theta > 0.0) || !(theta < 1.0)) {
            throw ConfigError("run config: margin outside (0,1)");
        }
    }
};

enum class SolveStatus {
    Converged,      ///< residual below tolerance
    MaxIterations,  ///< budget exhausted with residual above tolerance
    LeftS,          ///< an iterate failed the invariant-set check
};

inline const char* to_string(SolveStatus st) noexcept {
    switch (st) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::LeftS: return "left-invariant-set";
    }
    return "unknown";
}

/// One report line per (iteration, grid point) — the CSV rows of the runner.
struct IterationRow {
    std::size_t iter;
    double tau;
    double s;
    double residual;  ///< seminorm of u_k - u_{k-1} at this (tau, s)
    bool s1_ok;
    bool s2_ok;
    bool s3_ok;
    double elapsed_ms;  ///< 0 unless timing collection is enabled
};

/// Per grid point, aggregated over the whole iteration family.
struct GridDiagnostic {
    double tau;
    double s;
    double family_bound;      ///< max over iterates of the running sup norm
    double family_lipschitz;  ///< max over iterates of the adjacent quotient
    double final_seminorm;    ///< running sup norm of the final iterate
};

struct SolverReport {
    SolveStatus status = SolveStatus::MaxIterations;
    std::size_t iterations = 0;
    double final_residual = 0.0;  ///< max residual over the grid, last iteration
    std::vector<IterationRow> rows;
    std::vector<GridDiagnostic> diagnostics;
    std::vector<SetSReport> set_reports;  ///< one per iterate, same order
    ScalePath solution = ScalePath::zero({0.0, 1.0});
    std::string label;
};

/// One application of the fixed-point operator: cumulative trapezoid
/// integration of the right-hand side along the path's own grid.  The
/// result starts at zero by construction.
inline ScalePath apply_F(const ProblemSpec& p, const ExistenceFrame& frame,
                         const ScalePath& u) {
    if (!(u.final_time() < frame.tau)) {
        throw DomainError("apply_F: path horizon reaches the edge of the triangle");
    }
    const std::size_t m = u.size();
    std::vector<PowerSeries> rhs;
    rhs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        rhs.push_back(evaluate_A(p, u.time(i), u.value(i), u.value(i)) +
                      evaluate_h(p, u.time(i), u.value(i)));
    }
    std::vector<PowerSeries> out(m);
    out[0] = PowerSeries{};
    for (std::size_t i = 1; i < m; ++i) {
        const double half_dt = 0.5 * (u.time(i) - u.time(i - 1));
        out[i] = out[i - 1] + half_dt * (rhs[i - 1] + rhs[i]);
    }
    return ScalePath(u.times(), std::move(out));
}

/// Iterate F from the zero curve until the grid residual drops below the
/// tolerance, the iteration budget runs out, or an iterate leaves the
/// invariant set.  The horizon is the largest monitored tau of the grid.
inline SolverReport solve_picard(const ProblemSpec& p, const ExistenceFrame& frame,
                                 const SeminormGrid& grid, const RunConfig& config) {
    config.validate();
    grid.require_inside(frame);

    const double horizon = grid.max_tau();
    const std::size_t steps =
        config.step > 0.0
            ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                           std::ceil(horizon / config.step - 1e-9)))
            : 1000;

    SolverReport rep;
    rep.label = p.label;
    rep.diagnostics.reserve(grid.points().size());
    for (const auto& pt : grid.points()) {
        rep.diagnostics.push_back({pt.tau, pt.s, 0.0, 0.0, 0.0});
    }

    ScalePath u_prev = ScalePath::zero(uniform_times(horizon, steps));
    rep.solution = u_prev;
    rep.status = SolveStatus::MaxIterations;
    rep.iterations = config.max_iter;

    using clock = std::chrono::steady_clock;
    for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
        const auto t0 = clock::now();
        ScalePath u_next = apply_F(p, frame, u_prev);
        const ScalePath diff = path_difference(u_next, u_prev);
        const SetSReport sset = check_S(u_next, p, frame, grid);
        const double elapsed =
            config.collect_timings
                ? std::chrono::duration<double, std::milli>(clock::now() - t0).count()
                : 0.0;

        double residual_max = 0.0;
        for (std::size_t g = 0; g < grid.points().size(); ++g) {
            const auto& pt = grid.points()[g];
            const auto& verdict = sset.grid[g];
            const double res = seminorm(diff, pt.tau, ScaleIndex(pt.s));
            residual_max = std::max(residual_max, res);
            rep.rows.push_back({iter, pt.tau, pt.s, res, verdict.s1_ok, verdict.s2_ok,
                                verdict.s3_ok, elapsed});

            auto& diag = rep.diagnostics[g];
            diag.family_bound = std::max(diag.family_bound, verdict.sup_norm);
            diag.family_lipschitz = std::max(diag.family_lipschitz, verdict.worst_slope);
            diag.final_seminorm = verdict.sup_norm;
        }

        rep.set_reports.push_back(sset);
        rep.solution = u_next;
        rep.final_residual = residual_max;

        if (!sset.in_S) {
            rep.status = SolveStatus::LeftS;
            rep.iterations = iter;
            break;
        }
        if (residual_max <= config.tol) {
            rep.status = SolveStatus::Converged;
            rep.iterations = iter;
            break;
        }
        u_prev = std::move(u_next);
    }
    return rep;
}

}  // namespace ovk
