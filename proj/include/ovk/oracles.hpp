#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ovk/constants.hpp"
#include "ovk/errors.hpp"
#include "ovk/expr.hpp"
#include "ovk/series.hpp"

namespace ovk {

// ===========================================================================
// Independent reference solutions
//
// Everything in this header deliberately avoids the fixed-point machinery:
// closed formulas and a time-Taylor recursion give answers through a second
// route, so the solver can be tested against values it had no hand in.
// ===========================================================================

/// Exact solution of  u' = d/dx u + g,  u(0) = 0:  with G an antiderivative
/// of g, the solution at time t is  G(x + t) - G(x).
inline PowerSeries exact_transport(const PowerSeries& g, double t,
                                   std::size_t max_degree = no_degree_cap) {
    const PowerSeries G = antiderivative(g);
    return truncate(taylor_shift(G, t) - G, max_degree);
}

/// Solution represented by its Taylor expansion in time:
/// u(t) = sum_m terms[m] t^m, each coefficient a series in x.
struct TimeTaylorSolution {
    std::vector<PowerSeries> terms;

    PowerSeries evaluate(double t) const {
        PowerSeries acc;
        for (std::size_t m = terms.size(); m-- > 0;) {
            acc = t * acc + terms[m];
        }
        return acc;
    }

    /// Ratio-test estimate of the radius of convergence in t, measured in
    /// the norm at `s`.  A vanishing tail means the recursion terminated —
    /// the solution is polynomial in t as far as computed, radius infinite.
    double empirical_radius(ScaleIndex s) const {
        std::vector<std::pair<std::size_t, double>> nz;
        for (std::size_t m = 0; m < terms.size(); ++m) {
            const double n = norm(terms[m], s);
            if (n > 0.0) nz.emplace_back(m, n);
        }
        // A trailing zero run of length >= 2 reads as termination rather
        // than parity structure (odd series drop every other term).
        if (nz.size() < 2 || nz.back().first + 2 < terms.size()) {
            return std::numeric_limits<double>::infinity();
        }
        const auto [m1, n1] = nz[nz.size() - 2];
        const auto [m2, n2] = nz[nz.size() - 1];
        return std::pow(n1 / n2, 1.0 / static_cast<double>(m2 - m1));
    }
};

namespace detail {

// Polynomials in t with series coefficients: the ring the time-Taylor
// recursion works in.  Index = power of t.
using TPoly = std::vector<PowerSeries>;

inline TPoly eval_tpoly(const ExprPtr& e, const TPoly& u, const TPoly& v,
                        std::size_t m_cap, std::size_t N) {
    if (!e) throw StructuralError("taylor evaluation: empty expression");
    switch (e->kind()) {
        case ExprKind::Constant:
            return {truncate(e->value(), N)};
        case ExprKind::ArgU:
            return u;
        case ExprKind::ArgV:
            return v;
        case ExprKind::Derivative: {
            TPoly c = eval_tpoly(e->child(), u, v, m_cap, N);
            for (auto& term : c) term = derivative(term);
            return c;
        }
        case ExprKind::Sum: {
            TPoly l = eval_tpoly(e->lhs(), u, v, m_cap, N);
            TPoly r = eval_tpoly(e->rhs(), u, v, m_cap, N);
            if (l.size() < r.size()) l.swap(r);
            for (std::size_t i = 0; i < r.size(); ++i) l[i] = l[i] + r[i];
            return l;
        }
        case ExprKind::Product: {
            const TPoly l = eval_tpoly(e->lhs(), u, v, m_cap, N);
            const TPoly r = eval_tpoly(e->rhs(), u, v, m_cap, N);
            TPoly out(std::min(m_cap + 1, l.size() + r.size() - 1));
            for (std::size_t i = 0; i < l.size(); ++i) {
                for (std::size_t j = 0; j < r.size(); ++j) {
                    if (i + j >= out.size()) break;
                    out[i + j] = out[i + j] + cauchy_product(l[i], r[j], N);
                }
            }
            return out;
        }
        case ExprKind::TimeScale: {
            const TPoly c = eval_tpoly(e->child(), u, v, m_cap, N);
            const auto& p = e->poly();
            TPoly out(std::min(m_cap + 1, c.size() + p.size() - 1));
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p[i] == 0.0) continue;
                for (std::size_t j = 0; j < c.size(); ++j) {
                    if (i + j >= out.size()) break;
                    out[i + j] = out[i + j] + p[i] * c[j];
                }
            }
            return out;
        }
    }
    throw StructuralError("taylor evaluation: unknown node kind");
}

}  // namespace detail

/// Time-Taylor recursion for  u' = A(t, u, u) + h(t, u),  u(0) = 0:
/// matching powers of t on both sides gives  (m+1) u_{m+1} = [t^m] RHS(u),
/// and the right-hand side's t^m coefficient only involves u_0..u_m, so the
/// terms come out one by one.  Independent of quadrature and iteration —
/// this is the reference the fixed-point solver is measured against.
inline TimeTaylorSolution taylor_ck(const ProblemSpec& p, std::size_t m_max) {
    if (m_max == 0) throw ConfigError("taylor_ck: need at least one term");
    TimeTaylorSolution sol;
    sol.terms.assign(1, PowerSeries{});  // u(0) = 0
    for (std::size_t m = 0; m < m_max; ++m) {
        const detail::TPoly rhs_A =
            detail::eval_tpoly(p.A, sol.terms, sol.terms, m, p.N);
        const detail::TPoly rhs_h =
            detail::eval_tpoly(p.h, sol.terms, sol.terms, m, p.N);
        PowerSeries cm;
        if (m < rhs_A.size()) cm = cm + rhs_A[m];
        if (m < rhs_h.size()) cm = cm + rhs_h[m];
        sol.terms.push_back((1.0 / static_cast<double>(m + 1)) * cm);
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Divergence probes
// ---------------------------------------------------------------------------

struct DivergenceProbe {
    double slope = 0.0;  ///< log-log slope of the per-delta maxima
    std::vector<std::pair<double, double>> per_delta;
};

/// Run the M-sampler at each rung of a gap ladder and fit the log-log slope
/// of the maxima.  First-order operators plateau (slope near 0); operators
/// losing two derivatives grow like 1/delta (slope near -1).
inline DivergenceProbe probe_operator(const ProblemSpec& p,
                                      const std::vector<double>& deltas,
                                      std::uint64_t seed = 0) {
    if (deltas.size() < 3) {
        throw ConfigError("divergence probe: ladder needs at least 3 rungs");
    }
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || !(deltas[i] < 1.0)) {
            throw ConfigError("divergence probe: gap outside (0,1)");
        }
        if (i > 0 && !(deltas[i] < deltas[i - 1])) {
            throw ConfigError("divergence probe: ladder must be strictly decreasing");
        }
    }
    SamplingPlan plan = SamplingPlan::defaults(p.N, 1.0, seed);
    plan.deltas = deltas;
    const ConstantsEstimate est = estimate_M(p, plan);
    if (!est.ladder_slope) {
        throw ConfigError("divergence probe: ladder produced no usable maxima");
    }
    return {*est.ladder_slope, est.per_delta};
}

/// The canonical second-order probe: samples the ratio ladder for the
/// operator  v -> d^2/dx^2 v  and reports its slope (expected near -1,
/// the signature of an operator outside the one-derivative class).
inline DivergenceProbe heat_probe(const std::vector<double>& deltas,
                                  std::uint64_t seed = 0) {
    const ExprPtr second = OperatorExpr::dx(OperatorExpr::dx(OperatorExpr::arg_v()));
    const ProblemSpec p(second, OperatorExpr::constant(PowerSeries{}), 1.0, 64,
                        "second-derivative probe");
    return probe_operator(p, deltas, seed);
}

}  // namespace ovk
