#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ovk/expr.hpp"
#include "ovk/frame.hpp"
#include "ovk/path.hpp"

namespace ovk {

// ===========================================================================
// The invariant set
//
// A curve v belongs to the set S of the contraction argument when, at every
// monitored (tau, s):
//
//   (s1)  sup_{t <= tau} ||v(t)||_s <= R,
//   (s2)  ||A(t, u, v(t))||_s <= 1 / sqrt(1 - a t - s)   for every curve u
//         that itself satisfies (s1) — checked against a finite probe family,
//   (s3)  ||v(t1) - v(t2)||_s <= (K + 2/a) |t1 - t2|.
//
// (s3) is certified from adjacent grid differences only: the difference over
// any pair telescopes through the nodes between them, so the worst adjacent
// quotient already bounds every pairwise quotient.
// ===========================================================================

struct SetSGridVerdict {
    double tau = 0.0;
    double s = 0.0;
    bool s1_ok = false;
    bool s2_ok = false;
    bool s3_ok = false;
    double sup_norm = 0.0;     ///< running sup of ||v(t)||_s up to tau
    double s1_margin = 0.0;    ///< R - sup_norm
    double s2_margin = 0.0;    ///< min over probes/times of bound - value
    double worst_slope = 0.0;  ///< max adjacent difference quotient at this (tau, s)
    double s3_margin = 0.0;    ///< (K + 2/a) - worst_slope

    bool ok() const noexcept { return s1_ok && s2_ok && s3_ok; }
};

struct SetSReport {
    std::vector<SetSGridVerdict> grid;
    bool s1_all = false;
    bool s2_all = false;
    bool s3_all = false;
    bool in_S = false;
    double lipschitz_allowed = 0.0;    ///< K + 2/a
    double lipschitz_empirical = 0.0;  ///< worst adjacent quotient over the grid
    double theta = 0.0;
};

/// The probe family (s2) is checked against: the zero curve, the constant
/// curves R and R x^k (all of norm <= R at every scale), and the candidate
/// itself — the diagonal u = v being the pairing the fixed-point operator
/// actually feeds to A.
inline std::vector<ScalePath> default_probes(const ProblemSpec& p,
                                             const ExistenceFrame& frame,
                                             const ScalePath& candidate) {
    (void)p;  // reserved: problem-aware probe families
    std::vector<ScalePath> probes;
    probes.push_back(ScalePath::zero(candidate.times()));
    probes.push_back(ScalePath::constant(candidate.times(),
                                         PowerSeries::constant(frame.R)));
    for (std::size_t k = 1; k <= 4; ++k) {
        probes.push_back(ScalePath::constant(candidate.times(),
                                             PowerSeries::monomial(k, frame.R)));
    }
    probes.push_back(candidate);
    return probes;
}

/// Check a candidate curve against (s1)-(s3) on every grid point.  The probe
/// curves stand in for the universally quantified u of (s2); A is evaluated
/// on a subsample of the candidate's time nodes (all grid horizons included)
/// to keep the check affordable on fine discretizations.
inline SetSReport check_S(const ScalePath& v, const ProblemSpec& p,
                          const ExistenceFrame& frame, const SeminormGrid& grid,
                          const std::vector<ScalePath>& probes) {
    grid.require_inside(frame);

    const std::vector<double> s_levels = grid.distinct_s();
    const std::size_t ns = s_levels.size();
    const std::size_t m = v.size();
    const double slack = 1e-12;

    // Nodewise norms and adjacent difference quotients, per scale level,
    // as prefix maxima so each grid point is a lookup.
    std::vector<std::vector<double>> prefix_norm(ns, std::vector<double>(m));
    std::vector<std::vector<double>> prefix_slope(ns, std::vector<double>(m, 0.0));
    for (std::size_t si = 0; si < ns; ++si) {
        const ScaleIndex s(s_levels[si]);
        double run = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            run = std::max(run, norm(v.value(i), s));
            prefix_norm[si][i] = run;
        }
        double slope_run = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
            const double dt = v.time(i) - v.time(i - 1);
            slope_run = std::max(slope_run, norm(v.value(i) - v.value(i - 1), s) / dt);
            prefix_slope[si][i] = slope_run;
        }
    }

    const auto cutoff_index = [&](double tau) {
        const double cut = tau + 1e-12 * std::max(1.0, tau);
        std::size_t idx = 0;
        while (idx + 1 < m && v.time(idx + 1) <= cut) ++idx;
        return idx;
    };

    // Subsampled node set for the operator checks: roughly 64 nodes spread
    // over the grid, plus the exact horizon node of every monitored tau.
    std::vector<std::size_t> check_idx;
    {
        const std::size_t stride = std::max<std::size_t>(1, (m - 1) / 64 + 1);
        for (std::size_t i = 0; i < m; i += stride) check_idx.push_back(i);
        check_idx.push_back(m - 1);
        for (const auto& pt : grid.points()) check_idx.push_back(cutoff_index(pt.tau));
        std::sort(check_idx.begin(), check_idx.end());
        check_idx.erase(std::unique(check_idx.begin(), check_idx.end()),
                        check_idx.end());
    }

    // ||A(t_i, probe(t_i), v(t_i))||_s for every (probe, node, scale level).
    std::vector<std::vector<std::vector<double>>> a_norm(
        probes.size(),
        std::vector<std::vector<double>>(check_idx.size(), std::vector<double>(ns)));
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        for (std::size_t ci = 0; ci < check_idx.size(); ++ci) {
            const double t = v.time(check_idx[ci]);
            const PowerSeries u_probe = probes[pi].value_at(std::min(t, probes[pi].final_time()));
            const PowerSeries w = evaluate_A(p, t, u_probe, v.value(check_idx[ci]));
            for (std::size_t si = 0; si < ns; ++si) {
                a_norm[pi][ci][si] = norm(w, ScaleIndex(s_levels[si]));
            }
        }
    }

    SetSReport rep;
    rep.theta = grid.theta();
    rep.lipschitz_allowed = frame.K + 2.0 / frame.a;
    rep.s1_all = rep.s2_all = rep.s3_all = true;

    for (const auto& pt : grid.points()) {
        const std::size_t si = static_cast<std::size_t>(
            std::lower_bound(s_levels.begin(), s_levels.end(), pt.s) - s_levels.begin());
        const std::size_t it = cutoff_index(pt.tau);

        SetSGridVerdict verdict;
        verdict.tau = pt.tau;
        verdict.s = pt.s;

        verdict.sup_norm = prefix_norm[si][it];
        verdict.s1_margin = frame.R - verdict.sup_norm;
        verdict.s1_ok = verdict.sup_norm <= frame.R * (1.0 + slack);

        verdict.worst_slope = prefix_slope[si][it];
        verdict.s3_margin = rep.lipschitz_allowed - verdict.worst_slope;
        verdict.s3_ok = verdict.worst_slope <= rep.lipschitz_allowed * (1.0 + slack);

        verdict.s2_margin = std::numeric_limits<double>::infinity();
        verdict.s2_ok = true;
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            for (std::size_t ci = 0; ci < check_idx.size() && check_idx[ci] <= it; ++ci) {
                const double t = v.time(check_idx[ci]);
                const double margin = frame.triangle_margin(t, pt.s);
                const double bound = 1.0 / std::sqrt(margin);
                const double gap = bound - a_norm[pi][ci][si];
                verdict.s2_margin = std::min(verdict.s2_margin, gap);
                if (a_norm[pi][ci][si] > bound * (1.0 + slack)) verdict.s2_ok = false;
            }
        }

        rep.s1_all = rep.s1_all && verdict.s1_ok;
        rep.s2_all = rep.s2_all && verdict.s2_ok;
        rep.s3_all = rep.s3_all && verdict.s3_ok;
        rep.lipschitz_empirical = std::max(rep.lipschitz_empirical, verdict.worst_slope);
        rep.grid.push_back(verdict);
    }

    rep.in_S = rep.s1_all && rep.s2_all && rep.s3_all;
    return rep;
}

/// Convenience overload using the default probe family.
inline SetSReport check_S(const ScalePath& v, const ProblemSpec& p,
                          const ExistenceFrame& frame, const SeminormGrid& grid) {
    return check_S(v, p, frame, grid, default_probes(p, frame, v));
}

}  // namespace ovk
