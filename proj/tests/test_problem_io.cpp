#include <catch2/catch_amalgamated.hpp>

#include "ovk/problem_io.hpp"

using namespace ovk;

namespace {

const char* transport_text = R"(# demo
label = transport
A = (dx arg_v)
h = (series 0 1)
R = 2
N = 64
M = 1
K = 1
)";

}  // namespace

TEST_CASE("expression grammar round trips") {
    const char* forms[] = {
        "arg_u",
        "arg_v",
        "(dx arg_v)",
        "(series 0 1)",
        "(series -1.5 0 2.25e-3)",
        "(mul arg_u (dx arg_v))",
        "(add (dx arg_v) (mul arg_u arg_v))",
        "(tscale (poly 1 -1) (dx arg_v))",
        "(tscale (poly 0.5) (add arg_v (series 3)))",
    };
    for (const char* form : forms) {
        const ExprPtr parsed = parse_expression(form);
        const std::string text = expression_to_text(parsed);
        const ExprPtr reparsed = parse_expression(text);
        CHECK(structurally_equal(parsed, reparsed));
        // Canonical text is a fixed point.
        CHECK(expression_to_text(reparsed) == text);
    }
}

TEST_CASE("expression grammar rejects malformed input with positions") {
    // Unknown atom.
    try {
        parse_expression("argv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 1);
    }

    CHECK_THROWS_AS(parse_expression("(dx arg_v"), ParseError);     // unbalanced
    CHECK_THROWS_AS(parse_expression("(dx arg_v))"), ParseError);   // trailing
    CHECK_THROWS_AS(parse_expression("(mul arg_u)"), ParseError);   // arity
    CHECK_THROWS_AS(parse_expression("(series)"), ParseError);      // empty
    CHECK_THROWS_AS(parse_expression("(series one)"), ParseError);  // not a number
    CHECK_THROWS_AS(parse_expression("(spin arg_v)"), ParseError);  // unknown op
    CHECK_THROWS_AS(parse_expression("(tscale arg_v arg_v)"), ParseError);
    CHECK_THROWS_AS(parse_expression("42"), ParseError);  // bare number
}

TEST_CASE("problem files parse with defaults") {
    const ProblemFile pf = parse_problem(transport_text);
    CHECK(pf.spec.label == "transport");
    CHECK(pf.spec.R == 2.0);
    CHECK(pf.spec.N == 64);
    CHECK(structurally_equal(pf.spec.A, parse_expression("(dx arg_v)")));
    CHECK(structurally_equal(pf.spec.h, parse_expression("(series 0 1)")));
    REQUIRE(pf.M.has_value());
    CHECK(*pf.M == 1.0);
    REQUIRE(pf.K.has_value());
    CHECK(*pf.K == 1.0);
    CHECK_FALSE(pf.a.has_value());

    // Untouched settings keep their defaults.
    CHECK(pf.config.s == 0.5);
    CHECK(pf.config.tau_frac == 0.5);
    CHECK(pf.config.step == 0.0);
    CHECK(pf.config.max_iter == 25);
    CHECK(pf.config.tol == 1e-10);
    CHECK(pf.config.theta == 0.1);
    CHECK(pf.config.seed == 0);
}

TEST_CASE("problem files round trip canonically") {
    const ProblemFile pf = parse_problem(transport_text);
    const std::string once = serialize_problem(pf);
    const ProblemFile back = parse_problem(once);

    CHECK(structurally_equal(pf.spec.A, back.spec.A));
    CHECK(structurally_equal(pf.spec.h, back.spec.h));
    CHECK(back.spec.R == pf.spec.R);
    CHECK(back.spec.N == pf.spec.N);
    CHECK(back.spec.label == pf.spec.label);
    CHECK(back.M == pf.M);
    CHECK(back.K == pf.K);
    CHECK(back.a == pf.a);
    CHECK(back.config.s == pf.config.s);
    CHECK(back.config.max_iter == pf.config.max_iter);

    // Serialization of the reparse is byte-identical.
    CHECK(serialize_problem(back) == once);
}

TEST_CASE("awkward numbers survive the round trip exactly") {
    ProblemFile pf = parse_problem(transport_text);
    pf.config.tol = 0.1;  // not representable exactly — shortest form must survive
    pf.config.s = 1.0 / 3.0;
    pf.M = 6.65685424949238;
    const ProblemFile back = parse_problem(serialize_problem(pf));
    CHECK(back.config.tol == pf.config.tol);
    CHECK(back.config.s == pf.config.s);
    CHECK(*back.M == *pf.M);
}

TEST_CASE("problem file errors carry positions") {
    try {
        parse_problem("label = ok\nR 2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }

    CHECK_THROWS_AS(parse_problem("R = \n"), ParseError);            // missing value
    CHECK_THROWS_AS(parse_problem("radius = 2\n"), ParseError);      // unknown key
    CHECK_THROWS_AS(parse_problem("R = 2\nR = 3\n"), ParseError);    // duplicate
    CHECK_THROWS_AS(parse_problem("R = two\n"), ParseError);         // bad number
    CHECK_THROWS_AS(parse_problem("A = (dx arg_v)\n"), ParseError);  // missing h, R
    CHECK_THROWS_AS(parse_problem("N = -1\nA = arg_v\nh = (series 1)\nR = 1\n"),
                    ParseError);  // counts are nonnegative

    // Semantic failures keep their own categories.
    CHECK_THROWS_AS(
        parse_problem("A = (dx arg_v)\nh = (dx arg_v)\nR = 2\n"),
        StructuralError);  // source reads the second slot
    CHECK_THROWS_AS(
        parse_problem("A = (dx arg_v)\nh = (series 0 1)\nR = -1\n"),
        DomainError);
}

TEST_CASE("unreadable files are a config error") {
    CHECK_THROWS_AS(load_problem("/nonexistent/missing.prob"), ConfigError);
}
