#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ovk/constants.hpp"
#include "ovk/errors.hpp"
#include "ovk/frame.hpp"
#include "ovk/invariant_set.hpp"
#include "ovk/kn.hpp"
#include "ovk/oracles.hpp"
#include "ovk/picard.hpp"
#include "ovk/problem_io.hpp"

namespace ovk {

// ===========================================================================
// Command layer
//
// Thin, stream-based implementations of the three CLI verbs, kept out of
// main() so tests can drive them in-process.  Exit codes:
//
//   0  success
//   1  unreadable/invalid input
//   2  the iteration ran but did not converge (budget, or left the set)
//   3  a verification check failed (divergent ladder, convexity, domination,
//      invariant set)
// ===========================================================================

enum class Command { Bounds, Verify, Solve };

struct CliOptions {
    std::optional<double> s;
    std::optional<double> tau_frac;
    std::optional<double> step;
    std::optional<std::size_t> max_iter;
    std::optional<double> tol;
    std::optional<double> theta;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    bool timing = false;  ///< real elapsed_ms in the CSV (breaks byte determinism)
};

namespace detail {

inline void apply_overrides(ProblemFile& pf, const CliOptions& opt) {
    if (opt.s) pf.config.s = *opt.s;
    if (opt.tau_frac) pf.config.tau_frac = *opt.tau_frac;
    if (opt.step) pf.config.step = *opt.step;
    if (opt.max_iter) pf.config.max_iter = *opt.max_iter;
    if (opt.tol) pf.config.tol = *opt.tol;
    if (opt.theta) pf.config.theta = *opt.theta;
    if (opt.seed) pf.config.seed = *opt.seed;
    pf.config.collect_timings = opt.timing;
    pf.config.validate();
}

struct ResolvedConstants {
    double M = 0.0;
    double K = 0.0;
    bool from_estimate = false;        ///< at least one constant was sampled
    std::optional<double> divergence;  ///< ladder slope when the sampler flagged blowup
    std::optional<ConstantsEstimate> m_report;
    std::optional<ConstantsEstimate> k_report;
};

/// Pick the constants a frame will run with: explicit file values win, then
/// closed-form bounds, then the sampled estimates.  When the horizon is not
/// yet known the estimate is done at T = 1 and redone on the actual lifetime
/// for time-dependent trees.
inline ResolvedConstants resolve_constants(const ProblemFile& pf, bool force_estimate) {
    ResolvedConstants rc;
    const bool need_M = !pf.M.has_value();
    const bool need_K = !pf.K.has_value();

    if (force_estimate || need_M || need_K) {
        const bool time_dep = pf.spec.A->contains_time() || pf.spec.h->contains_time();
        SamplingPlan plan = SamplingPlan::defaults(pf.spec.N, 1.0, pf.config.seed);
        ConstantsEstimate em = estimate_M(pf.spec, plan);
        ConstantsEstimate ek = estimate_K(pf.spec, plan);
        if (time_dep) {
            // Second pass on the actual lifetime implied by the first pass.
            const double M1 = pf.M ? *pf.M : em.M_analytic.value_or(em.M_est);
            const double K1 = pf.K ? *pf.K : ek.K_analytic.value_or(ek.K_est);
            const double a1 = pf.a ? *pf.a : compute_a(M1, K1);
            if (a1 > 0.0) {
                const double T = (1.0 - pf.config.s) / a1;
                plan = SamplingPlan::defaults(pf.spec.N, T, pf.config.seed);
                em = estimate_M(pf.spec, plan);
                ek = estimate_K(pf.spec, plan);
            }
        }
        rc.m_report = em;
        rc.k_report = ek;
        if (need_M) rc.divergence = em.divergence_slope;
        rc.M = pf.M ? *pf.M : em.M_analytic.value_or(em.M_est);
        rc.K = pf.K ? *pf.K : ek.K_analytic.value_or(ek.K_est);
        rc.from_estimate = need_M || need_K;
    } else {
        rc.M = *pf.M;
        rc.K = *pf.K;
    }
    return rc;
}

inline void write_csv(std::ostream& out, const SolverReport& rep) {
    out << "iter,tau,s,residual,s1_ok,s2_ok,s3_ok,elapsed_ms\n";
    for (const auto& row : rep.rows) {
        out << row.iter << ',' << format_double(row.tau) << ',' << format_double(row.s)
            << ',' << format_double(row.residual) << ',' << (row.s1_ok ? 1 : 0) << ','
            << (row.s2_ok ? 1 : 0) << ',' << (row.s3_ok ? 1 : 0) << ','
            << format_double(row.elapsed_ms) << '\n';
    }
}

inline void print_estimate(std::ostream& out, const char* which,
                           const ConstantsEstimate& est, bool is_M) {
    const double value = is_M ? est.M_est : est.K_est;
    const auto& analytic = is_M ? est.M_analytic : est.K_analytic;
    out << which << "_est = " << format_double(value);
    if (analytic) {
        out << "   (" << which << "_analytic = " << format_double(*analytic) << ")";
    }
    out << "\n";
    if (is_M) {
        out << "ladder:";
        for (const auto& [d, r] : est.per_delta) {
            out << "  " << format_double(d) << " -> " << format_double(r);
        }
        if (est.ladder_slope) out << "   slope = " << format_double(*est.ladder_slope);
        out << "\n";
    }
}

}  // namespace detail

inline int run_command(Command cmd, const std::string& problem_path,
                       const CliOptions& opt, std::ostream& out, std::ostream& err) {
    ProblemFile pf = load_problem(problem_path);
    detail::apply_overrides(pf, opt);

    const ProblemSpec& spec = pf.spec;
    const ScaleIndex base_s(pf.config.s);

    switch (cmd) {
        case Command::Bounds: {
            const detail::ResolvedConstants rc = detail::resolve_constants(pf, true);
            out << "label = " << spec.label << "\n";
            detail::print_estimate(out, "M", *rc.m_report, true);
            detail::print_estimate(out, "K", *rc.k_report, false);
            const ExistenceFrame frame(rc.M, rc.K, spec.R, base_s,
                                       pf.a ? pf.a : std::optional<double>{});
            out << "M = " << detail::format_double(frame.M)
                << "   K = " << detail::format_double(frame.K)
                << "   R = " << detail::format_double(frame.R) << "\n";
            out << "a = " << detail::format_double(frame.a)
                << "   tau_max = " << detail::format_double(frame.tau)
                << "   (s = " << detail::format_double(frame.base_s.value()) << ")\n";
            if (rc.divergence && !pf.M) {
                out << "divergence: ladder slope = " << detail::format_double(*rc.divergence)
                    << " — no finite scale-regularity constant, bounds are not usable\n";
                return 3;
            }
            out << "divergence: none\n";
            return 0;
        }

        case Command::Verify: {
            bool all_ok = true;

            // 1. Scale-regularity ladder: first-order trees plateau, anything
            //    losing more scale diverges as the gap shrinks.
            const DivergenceProbe probe =
                probe_operator(spec, {0.2, 0.1, 0.05, 0.025}, pf.config.seed);
            const bool ladder_ok = probe.slope >= divergence_slope_threshold;
            out << (ladder_ok ? "[ok]   " : "[FAIL] ")
                << "scale-regularity ladder: slope = " << detail::format_double(probe.slope);
            if (!ladder_ok) {
                out << " — bound violated, ratio grows like 1/delta"
                    << " (slope ≈ " << detail::format_double(probe.slope)
                    << "; outside the one-derivative class)";
            }
            out << "\n";
            if (!ladder_ok) {
                out << "verification failed\n";
                return 3;
            }

            // 2. Convexity of v -> ||A(t,u,v)|| along random chords.
            const ConvexityReport cx = check_convexity(spec, 1000, pf.config.seed);
            const bool cx_ok = cx.max_violation <= 1e-9;
            all_ok = all_ok && cx_ok;
            out << (cx_ok ? "[ok]   " : "[FAIL] ") << "convexity: max violation = "
                << detail::format_double(cx.max_violation)
                << (cx.structurally_linear ? " (affine in the second slot)" : "") << "\n";

            // 3. Frame from the resolved constants.
            const detail::ResolvedConstants rc = detail::resolve_constants(pf, false);
            const ExistenceFrame frame(rc.M, rc.K, spec.R, base_s,
                                       pf.a ? pf.a : std::optional<double>{});
            out << "frame: M = " << detail::format_double(frame.M)
                << ", K = " << detail::format_double(frame.K)
                << ", a = " << detail::format_double(frame.a)
                << ", tau_max = " << detail::format_double(frame.tau) << "\n";

            // 4. Key-integral domination on a random monitoring grid.
            const SeminormGrid kn_grid =
                SeminormGrid::random(frame, 0.05, 200, pf.config.seed);
            const KnReport kn = verify_kn(frame, kn_grid);
            all_ok = all_ok && kn.dominated;
            out << (kn.dominated ? "[ok]   " : "[FAIL] ")
                << "key-integral domination: max ratio = "
                << detail::format_double(kn.max_ratio) << " over "
                << kn.points.size() << " points\n";

            // 5. Invariant set: the zero curve and its image under one
            //    application of the fixed-point operator.
            const double horizon = pf.config.tau_frac * frame.tau;
            const SeminormGrid grid =
                SeminormGrid::regular(frame, pf.config.theta, horizon, 4, 5);
            const ScalePath zero = ScalePath::zero(uniform_times(horizon, 200));
            const SetSReport s_zero = check_S(zero, spec, frame, grid);
            const ScalePath first = apply_F(spec, frame, zero);
            const SetSReport s_first = check_S(first, spec, frame, grid);
            const bool set_ok = s_zero.in_S && s_first.in_S;
            all_ok = all_ok && set_ok;
            out << (set_ok ? "[ok]   " : "[FAIL] ")
                << "invariant set: zero curve " << (s_zero.in_S ? "in S" : "NOT in S")
                << ", image " << (s_first.in_S ? "in S" : "NOT in S") << "\n";

            out << (all_ok ? "verification passed\n" : "verification failed\n");
            return all_ok ? 0 : 3;
        }

        case Command::Solve: {
            const detail::ResolvedConstants rc = detail::resolve_constants(pf, false);
            if (rc.from_estimate && rc.divergence) {
                err << "error: scale-regularity ladder diverges (slope = "
                    << detail::format_double(*rc.divergence)
                    << "); no finite constant to frame the iteration\n";
                return 3;
            }
            const ExistenceFrame frame(rc.M, rc.K, spec.R, base_s,
                                       pf.a ? pf.a : std::optional<double>{});
            const double horizon = pf.config.tau_frac * frame.tau;
            const SeminormGrid grid =
                SeminormGrid::regular(frame, pf.config.theta, horizon, 4, 5);
            const SolverReport rep = solve_picard(spec, frame, grid, pf.config);

            std::ostream* csv = &out;
            std::ofstream file;
            if (opt.out_path) {
                file.open(*opt.out_path, std::ios::binary);
                if (!file) {
                    err << "error: cannot write " << *opt.out_path << "\n";
                    return 1;
                }
                csv = &file;
            }
            detail::write_csv(*csv, rep);

            std::ostream& summary = opt.out_path ? out : err;
            summary << "label = " << rep.label << "\n";
            summary << "status = " << to_string(rep.status) << " after "
                    << rep.iterations << " iteration(s), residual = "
                    << detail::format_double(rep.final_residual) << "\n";
            summary << "frame: M = " << detail::format_double(frame.M)
                    << ", K = " << detail::format_double(frame.K)
                    << ", a = " << detail::format_double(frame.a)
                    << ", tau_max = " << detail::format_double(frame.tau)
                    << ", horizon = " << detail::format_double(horizon) << "\n";
            return rep.status == SolveStatus::Converged ? 0 : 2;
        }
    }
    return 1;
}

/// Exception-absorbing wrapper for main(): input problems become exit 1.
inline int run_command_guarded(Command cmd, const std::string& problem_path,
                               const CliOptions& opt, std::ostream& out,
                               std::ostream& err) {
    try {
        return run_command(cmd, problem_path, opt, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ovk
