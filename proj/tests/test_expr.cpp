#include <catch2/catch_amalgamated.hpp>

#include "ovk/expr.hpp"

using namespace ovk;

namespace {

ExprPtr transport_A() { return OperatorExpr::dx(OperatorExpr::arg_v()); }
ExprPtr burgers_A() {
    return OperatorExpr::mul(OperatorExpr::arg_u(),
                             OperatorExpr::dx(OperatorExpr::arg_v()));
}

}  // namespace

TEST_CASE("structural queries") {
    const ExprPtr t = transport_A();
    CHECK(t->contains_v());
    CHECK_FALSE(t->contains_u());
    CHECK_FALSE(t->contains_time());
    CHECK(t->v_degree() == 1);
    CHECK(t->linear_in_v());

    const ExprPtr b = burgers_A();
    CHECK(b->contains_u());
    CHECK(b->v_degree() == 1);
    CHECK(b->linear_in_v());

    // v * dx(v) is genuinely quadratic in the second slot.
    const ExprPtr q = OperatorExpr::mul(OperatorExpr::arg_v(),
                                        OperatorExpr::dx(OperatorExpr::arg_v()));
    CHECK(q->v_degree() == 2);
    CHECK_FALSE(q->linear_in_v());

    // Saturation: degree reports 2 for anything >= 2.
    const ExprPtr cubic = OperatorExpr::mul(q, OperatorExpr::arg_v());
    CHECK(cubic->v_degree() == 2);

    const ExprPtr ts = OperatorExpr::time_scale({1.0, -1.0}, transport_A());
    CHECK(ts->contains_time());
    CHECK(ts->linear_in_v());
}

TEST_CASE("evaluation binds the argument slots") {
    const PowerSeries u({0.0, 2.0});        // 2x
    const PowerSeries v({0.0, 0.0, 1.0});   // x^2

    CHECK(evaluate(transport_A(), 0.0, u, v) == PowerSeries({0.0, 2.0}));  // 2x
    // u * dx(v) = 2x * 2x = 4x^2
    CHECK(evaluate(burgers_A(), 0.0, u, v) == PowerSeries({0.0, 0.0, 4.0}));

    const ExprPtr sum = OperatorExpr::add(OperatorExpr::arg_u(), OperatorExpr::arg_v());
    CHECK(evaluate(sum, 0.0, u, v) == PowerSeries({0.0, 2.0, 1.0}));

    const ExprPtr c = OperatorExpr::constant(PowerSeries({1.0, 1.0}));
    CHECK(evaluate(c, 0.0, u, v) == PowerSeries({1.0, 1.0}));

    // (1 - t) * v at t = 0.25
    const ExprPtr damped = OperatorExpr::time_scale({1.0, -1.0}, OperatorExpr::arg_v());
    CHECK(evaluate(damped, 0.25, u, v) == PowerSeries({0.0, 0.0, 0.75}));
}

TEST_CASE("evaluation respects the degree cap") {
    const PowerSeries x32 = PowerSeries::monomial(32);
    const PowerSeries out = evaluate(burgers_A(), 0.0, x32, x32, 40);
    // x^32 * 32 x^31 lands at degree 63, above the cap — everything dropped.
    CHECK(out.is_zero());
    CHECK(out.truncated());

    const PowerSeries kept = evaluate(burgers_A(), 0.0, x32, x32, 64);
    CHECK(kept == PowerSeries::monomial(63, 32.0));
    CHECK_FALSE(kept.truncated());
}

TEST_CASE("problem validation") {
    const PowerSeries x({0.0, 1.0});
    CHECK_NOTHROW(ProblemSpec(transport_A(), OperatorExpr::constant(x), 2.0, 64));

    // Source terms must not read the second slot.
    CHECK_THROWS_AS(
        ProblemSpec(transport_A(), OperatorExpr::arg_v(), 2.0, 64),
        StructuralError);

    CHECK_THROWS_AS(
        ProblemSpec(transport_A(), OperatorExpr::constant(x), -1.0, 64),
        DomainError);
    CHECK_THROWS_AS(
        ProblemSpec(transport_A(), OperatorExpr::constant(x), 0.0, 64),
        DomainError);
    CHECK_THROWS_AS(
        ProblemSpec(transport_A(), OperatorExpr::constant(x), 2.0, 0),
        DomainError);
}

TEST_CASE("structural equality") {
    CHECK(structurally_equal(transport_A(), transport_A()));
    CHECK(structurally_equal(burgers_A(), burgers_A()));
    CHECK_FALSE(structurally_equal(transport_A(), burgers_A()));
    CHECK_FALSE(structurally_equal(
        OperatorExpr::constant(PowerSeries({1.0})),
        OperatorExpr::constant(PowerSeries({1.0, 0.0}))));  // shape-sensitive
    CHECK(structurally_equal(
        OperatorExpr::time_scale({1.0, 2.0}, transport_A()),
        OperatorExpr::time_scale({1.0, 2.0}, transport_A())));
    CHECK_FALSE(structurally_equal(
        OperatorExpr::time_scale({1.0, 2.0}, transport_A()),
        OperatorExpr::time_scale({1.0}, transport_A())));
}
