#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ovk/picard.hpp"

using namespace ovk;

namespace {

const PowerSeries x({0.0, 1.0});

ProblemSpec transport() {
    return ProblemSpec(OperatorExpr::dx(OperatorExpr::arg_v()),
                       OperatorExpr::constant(x), 2.0, 64, "transport");
}

}  // namespace

TEST_CASE("run config validation") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    RunConfig bad = cfg;
    bad.s = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.tau_frac = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.max_iter = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.theta = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("one application of F integrates the frozen right-hand side") {
    const ProblemSpec p = transport();
    const ExistenceFrame f(1.0, 1.0, p.R, ScaleIndex(0.5));

    const ScalePath zero = ScalePath::zero(uniform_times(0.02, 2));
    const ScalePath u1 = apply_F(p, f, zero);

    // F(0)(t) = t x for the transport right-hand side.
    CHECK(u1.value(0).is_zero());
    CHECK(u1.value(1).coefficient(1) == Catch::Approx(0.01).epsilon(1e-14));
    CHECK(u1.value(2).coefficient(1) == Catch::Approx(0.02).epsilon(1e-14));
    CHECK(u1.value(2).coefficient(0) == 0.0);

    // F(F(0))(t) = t x + t^2/2: the linear-in-t integrand is integrated
    // exactly by the trapezoid rule.
    const ScalePath u2 = apply_F(p, f, u1);
    CHECK(u2.value(2).coefficient(0) == Catch::Approx(0.0002).epsilon(1e-12));
    CHECK(u2.value(2).coefficient(1) == Catch::Approx(0.02).epsilon(1e-14));

    // The iteration is stationary from here: same integrand, same sums.
    const ScalePath u3 = apply_F(p, f, u2);
    for (std::size_t i = 0; i < u3.size(); ++i) {
        CHECK(u3.value(i) == u2.value(i));
    }
}

TEST_CASE("F rejects paths reaching the edge of the triangle") {
    const ProblemSpec p = transport();
    const ExistenceFrame f(1.0, 1.0, p.R, ScaleIndex(0.5));
    CHECK_THROWS_AS(apply_F(p, f, ScalePath::zero(uniform_times(f.tau, 10))),
                    DomainError);
    CHECK_NOTHROW(apply_F(p, f, ScalePath::zero(uniform_times(0.99 * f.tau, 10))));
}

TEST_CASE("cumulative trapezoid converges at second order") {
    // u' = t^2 integrates to t^3/3; the quadrature error at the endpoint is
    // dt^2 T / 6 exactly, so halving the step divides it by four.
    const ProblemSpec p(OperatorExpr::constant(PowerSeries{}),
                        OperatorExpr::time_scale({0.0, 0.0, 1.0},
                                                 OperatorExpr::constant(PowerSeries::constant(1.0))),
                        2.0, 8, "cubic-drive");
    const ExistenceFrame f(0.0, 1.0, p.R, ScaleIndex(0.5));  // a = 1, tau = 0.5
    const double T = 0.4;
    const double exact = T * T * T / 3.0;

    const auto endpoint_error = [&](std::size_t steps) {
        const ScalePath out = apply_F(p, f, ScalePath::zero(uniform_times(T, steps)));
        return std::abs(out.value(out.size() - 1).coefficient(0) - exact);
    };

    const double coarse = endpoint_error(50);
    const double fine = endpoint_error(100);
    CHECK(coarse / fine == Catch::Approx(4.0).epsilon(0.02));
}

TEST_CASE("constant drive converges in two iterations") {
    // u' = 1: F(anything) = t, so u2 == u1 and the residual hits zero.
    const ProblemSpec p(OperatorExpr::constant(PowerSeries{}),
                        OperatorExpr::constant(PowerSeries::constant(1.0)), 2.0, 8,
                        "clock");
    const ExistenceFrame f(0.0, 1.0, p.R, ScaleIndex(0.5));
    const SeminormGrid grid = SeminormGrid::regular(f, 0.1, 0.25 * f.tau, 4, 5);
    RunConfig cfg;
    const SolverReport rep = solve_picard(p, f, grid, cfg);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.iterations == 2);
    CHECK(rep.final_residual == 0.0);
}

TEST_CASE("transport run: convergence, rows, and the exact solution") {
    const ProblemSpec p = transport();
    const ExistenceFrame f(1.0, 1.0, p.R, ScaleIndex(0.5));
    const double horizon = 0.5 * f.tau;
    const SeminormGrid grid = SeminormGrid::regular(f, 0.1, horizon, 4, 5);
    RunConfig cfg;
    const SolverReport rep = solve_picard(p, f, grid, cfg);

    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.iterations <= 3);
    CHECK(rep.final_residual <= 1e-10);
    CHECK(rep.rows.size() == rep.iterations * grid.points().size());
    for (const auto& row : rep.rows) {
        CHECK(row.s1_ok);
        CHECK(row.s2_ok);
        CHECK(row.s3_ok);
        CHECK(row.elapsed_ms == 0.0);  // timings off by default
    }

    // u(t) = x t + t^2/2, nodewise.
    const ScalePath& u = rep.solution;
    for (std::size_t i = 0; i < u.size(); i += 100) {
        const double t = u.time(i);
        CHECK(std::abs(u.value(i).coefficient(0) - 0.5 * t * t) <= 1e-10);
        CHECK(std::abs(u.value(i).coefficient(1) - t) <= 1e-10);
        CHECK(u.value(i).degree() <= 2);
    }

    // Same grid, same seed, same rows: the pipeline is deterministic.
    const SolverReport again = solve_picard(p, f, grid, cfg);
    REQUIRE(again.rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(again.rows[i].residual == rep.rows[i].residual);
    }
}

TEST_CASE("iteration budget is honored") {
    const ProblemSpec p = transport();
    const ExistenceFrame f(1.0, 1.0, p.R, ScaleIndex(0.5));
    const SeminormGrid grid = SeminormGrid::regular(f, 0.1, 0.5 * f.tau, 4, 5);
    RunConfig cfg;
    cfg.max_iter = 1;
    const SolverReport rep = solve_picard(p, f, grid, cfg);
    CHECK(rep.status == SolveStatus::MaxIterations);
    CHECK(rep.iterations == 1);
    CHECK(rep.final_residual > 1e-10);
}

TEST_CASE("escaping the invariant set stops the iteration") {
    const ProblemSpec p(OperatorExpr::dx(OperatorExpr::arg_v()),
                        OperatorExpr::constant(PowerSeries::constant(5.0)), 0.05, 64,
                        "overdriven");
    const ExistenceFrame f(1.0, 5.0, p.R, ScaleIndex(0.5));
    const SeminormGrid grid = SeminormGrid::regular(f, 0.1, 0.5 * f.tau, 4, 5);
    RunConfig cfg;
    const SolverReport rep = solve_picard(p, f, grid, cfg);
    CHECK(rep.status == SolveStatus::LeftS);
    CHECK(rep.iterations == 1);
    bool some_s1_failed = false;
    for (const auto& row : rep.rows) some_s1_failed = some_s1_failed || !row.s1_ok;
    CHECK(some_s1_failed);
}

TEST_CASE("status names") {
    CHECK(std::string(to_string(SolveStatus::Converged)) == "converged");
    CHECK(std::string(to_string(SolveStatus::MaxIterations)) == "max-iterations");
    CHECK(std::string(to_string(SolveStatus::LeftS)) == "left-invariant-set");
}
