#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ovk/random.hpp"
#include "ovk/series.hpp"

using namespace ovk;

TEST_CASE("scale index accepts only the open unit interval") {
    CHECK_NOTHROW(ScaleIndex(0.5));
    CHECK_NOTHROW(ScaleIndex(1e-9));
    CHECK_THROWS_AS(ScaleIndex(0.0), DomainError);
    CHECK_THROWS_AS(ScaleIndex(1.0), DomainError);
    CHECK_THROWS_AS(ScaleIndex(-0.3), DomainError);
    CHECK_THROWS_AS(ScaleIndex(1.7), DomainError);
}

TEST_CASE("norm matches hand values") {
    CHECK(norm(PowerSeries::monomial(3), 0.5) == 0.125);
    CHECK(norm(PowerSeries({1.0, 2.0, 3.0}), 0.5) == 2.75);
    CHECK(norm(PowerSeries{}, 0.3) == 0.0);
    CHECK(norm(PowerSeries::constant(-4.0), 0.9) == 4.0);
    // Signs never matter: the weights see absolute values only.
    CHECK(norm(PowerSeries({1.0, -2.0, 3.0}), 0.5) ==
          norm(PowerSeries({-1.0, 2.0, -3.0}), 0.5));
}

TEST_CASE("arithmetic basics") {
    const PowerSeries one_plus_x({1.0, 1.0});
    const PowerSeries one_minus_x({1.0, -1.0});
    CHECK(one_plus_x * one_minus_x == PowerSeries({1.0, 0.0, -1.0}));

    CHECK(derivative(PowerSeries::monomial(4)) == PowerSeries::monomial(3, 4.0));
    CHECK(derivative(PowerSeries::constant(7.0)) == PowerSeries{});
    CHECK(antiderivative(PowerSeries({0.0, 1.0})) == PowerSeries({0.0, 0.0, 0.5}));

    CHECK(2.0 * PowerSeries({1.0, 1.0}) == PowerSeries({2.0, 2.0}));
    CHECK(PowerSeries({3.0, 1.0}) - PowerSeries({1.0, 1.0}) == PowerSeries({2.0}));
    CHECK(-PowerSeries({1.0, -2.0}) == PowerSeries({-1.0, 2.0}));
}

TEST_CASE("equality ignores trailing zeros and the truncation flag") {
    CHECK(PowerSeries({1.0, 2.0}) == PowerSeries({1.0, 2.0, 0.0, 0.0}));
    CHECK(PowerSeries({1.0, 2.0}, true) == PowerSeries({1.0, 2.0}, false));
    CHECK(PowerSeries({1.0, 2.0}) != PowerSeries({1.0, 2.0, 1e-300}));
}

TEST_CASE("truncation marks lossy cuts only") {
    const PowerSeries u({1.0, 2.0, 3.0, 4.0});
    const PowerSeries cut = truncate(u, 2);
    CHECK(cut.degree() == 2);
    CHECK(cut.truncated());

    const PowerSeries padded({1.0, 2.0, 0.0, 0.0});
    CHECK_FALSE(truncate(padded, 1).truncated());
    CHECK_FALSE(truncate(u, 10).truncated());

    // The flag survives arithmetic.
    CHECK((cut + PowerSeries::constant(1.0)).truncated());
    CHECK((2.0 * cut).truncated());
}

TEST_CASE("capped products drop high degrees and flag it") {
    const PowerSeries x2 = PowerSeries::monomial(2);
    const PowerSeries x3 = PowerSeries::monomial(3);
    const PowerSeries full = cauchy_product(x2, x3);
    CHECK(full == PowerSeries::monomial(5));
    CHECK_FALSE(full.truncated());

    const PowerSeries capped = cauchy_product(x2, x3, 4);
    CHECK(capped.is_zero());
    CHECK(capped.truncated());
}

TEST_CASE("derivative loses exactly the documented amount of scale") {
    // v = x^4 at s = 0.5, gap 0.25:  ||v'||_s = 0.5 must sit under
    // ||v||_{s+gap} / gap = 0.31640625 / 0.25.
    const PowerSeries v = PowerSeries::monomial(4);
    CHECK(norm(derivative(v), 0.5) == 0.5);
    CHECK(norm(v, 0.75) == 0.31640625);
    CHECK(norm(derivative(v), 0.5) <= norm(v, 0.75) / 0.25);
}

TEST_CASE("norm is exactly monotone in the scale") {
    // No tolerance on purpose: the weights are accumulated by iterated
    // multiplication and the terms are nonnegative, so every intermediate of
    // the larger-scale evaluation dominates the smaller-scale one.
    Rng rng(20240517);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t deg = 1 + rng.index(64);
        std::vector<double> c(deg + 1);
        for (double& v : c) v = rng.uniform(-1.0, 1.0);
        const PowerSeries u(std::move(c));

        const double s = rng.uniform(0.02, 0.95);
        const double gap = rng.uniform(0.01, 0.995 - s);
        REQUIRE(norm(u, s) <= norm(u, s + gap));
    }
}

TEST_CASE("norm properties hold to rounding accuracy") {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t deg = rng.index(32);
        std::vector<double> ca(deg + 1), cb(deg + 1);
        for (double& v : ca) v = rng.uniform(-2.0, 2.0);
        for (double& v : cb) v = rng.uniform(-2.0, 2.0);
        const PowerSeries a(std::move(ca)), b(std::move(cb));
        const ScaleIndex s(rng.uniform(0.05, 0.95));
        const double lam = rng.uniform(-3.0, 3.0);

        CHECK(norm(a + b, s) <= norm(a, s) + norm(b, s) + 1e-12);
        CHECK(norm(lam * a, s) ==
              Catch::Approx(std::abs(lam) * norm(a, s)).margin(1e-12));
        // The weighted space is a normed algebra under the Cauchy product.
        CHECK(norm(a * b, s) <= norm(a, s) * norm(b, s) * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("monomial certificate for the derivative bound") {
    // d k s^(k-1) <= (s+d)^k — the two-term binomial underestimate that
    // makes M = 1 sharp for d/dx on this scale.
    Rng rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        const double k = static_cast<double>(1 + rng.index(64));
        const double s = rng.uniform(0.01, 0.95);
        const double d = rng.uniform(0.01, 0.995 - s);
        CHECK(d * k * std::pow(s, k - 1.0) <= std::pow(s + d, k) * (1.0 + 1e-12));
    }
}

TEST_CASE("taylor shift recenters polynomials") {
    // (x+1)^2 = 1 + 2x + x^2
    const PowerSeries shifted = taylor_shift(PowerSeries::monomial(2), 1.0);
    CHECK(shifted.coefficient(0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(shifted.coefficient(1) == Catch::Approx(2.0).margin(1e-14));
    CHECK(shifted.coefficient(2) == Catch::Approx(1.0).margin(1e-14));

    // Shift by zero is the identity.
    const PowerSeries p({3.0, -1.0, 2.0, 0.5});
    CHECK(taylor_shift(p, 0.0) == p);

    // Forward then backward returns home (to rounding).
    const PowerSeries back = taylor_shift(taylor_shift(p, 0.3), -0.3);
    for (std::size_t k = 0; k <= p.degree(); ++k) {
        CHECK(back.coefficient(k) == Catch::Approx(p.coefficient(k)).margin(1e-13));
    }
}
