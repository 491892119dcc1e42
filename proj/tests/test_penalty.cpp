#include <doctest.h>

#include <cmath>
#include <random>

#include "ccpath/penalty.hpp"
#include "support/oracles.hpp"

using namespace ccpath;

TEST_CASE("SCAD derivative branches") {
    const auto scad = PenaltySpec::scad(3.7);
    CHECK(penalty_deriv(scad, 0.5, 1.0) == 1.0);
    // (a*lambda - t) / (a - 1) on the middle branch.
    CHECK(penalty_deriv(scad, 2.0, 1.0) == doctest::Approx(1.7 / 2.7).epsilon(1e-15));
    CHECK(penalty_deriv(scad, 3.7, 1.0) == 0.0);
    CHECK(penalty_deriv(scad, 10.0, 1.0) == 0.0);
    CHECK(penalty_deriv(scad, 0.0, 1.0) == 1.0);
}

TEST_CASE("MCP and L1 derivatives") {
    const auto mcp = PenaltySpec::mcp(3.0);
    CHECK(penalty_deriv(mcp, 4.0, 1.0) == 0.0);
    CHECK(penalty_deriv(mcp, 0.0, 1.0) == 1.0);
    CHECK(penalty_deriv(mcp, 1.5, 1.0) == doctest::Approx(0.5));
    CHECK(penalty_deriv(PenaltySpec::l1(), 7.0, 0.3) == 0.3);
}

TEST_CASE("shape parameter validation") {
    CHECK_THROWS_AS(PenaltySpec::scad(2.0), Error);
    CHECK_THROWS_AS(PenaltySpec::mcp(1.0), Error);
    CHECK_NOTHROW(PenaltySpec::scad(2.01));
    CHECK(PenaltySpec::make(PenaltyFamily::Scad).a() == 3.7);
    CHECK(PenaltySpec::make(PenaltyFamily::Mcp).a() == 3.0);
    CHECK(parse_penalty_family("mcp") == PenaltyFamily::Mcp);
    CHECK_THROWS_AS(parse_penalty_family("bridge"), Error);
    CHECK_THROWS_AS(penalty_deriv(PenaltySpec::scad(), -1.0, 1.0), Error);
    CHECK_THROWS_AS(penalty_value(PenaltySpec::scad(), 1.0, 0.0), Error);
}

TEST_CASE("penalty values") {
    for (auto spec : {PenaltySpec::scad(), PenaltySpec::mcp(), PenaltySpec::l1()})
        CHECK(penalty_value(spec, 0.0, 0.7) == 0.0);
    const auto scad = PenaltySpec::scad(3.7);
    CHECK(penalty_value(scad, 3.7, 1.0) == doctest::Approx(2.35).epsilon(1e-15));
    CHECK(penalty_value(scad, 50.0, 1.0) == doctest::Approx(2.35).epsilon(1e-15));
    CHECK(penalty_value(PenaltySpec::mcp(3.0), 1.5, 1.0) == doctest::Approx(1.125).epsilon(1e-15));
}

TEST_CASE("penalty value is the integral of the derivative") {
    // Composite Simpson rule on a fine grid as an independent antiderivative.
    for (auto spec : {PenaltySpec::scad(3.7), PenaltySpec::mcp(3.0), PenaltySpec::mcp(1.5), PenaltySpec::l1()}) {
        const double lambda = 0.8;
        for (double t : {0.3, 0.8, 1.1, 2.0, 2.9, 4.5}) {
            const int m = 20000;
            const double h = t / m;
            double s = spec.deriv(0.0, lambda) + spec.deriv(t, lambda);
            for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * spec.deriv(k * h, lambda);
            CHECK(spec.value(t, lambda) == doctest::Approx(s * h / 3.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("concave gradient") {
    const auto scad = PenaltySpec::scad(3.7);
    CHECK(concave_grad(scad, 0.5, 1.0) == 0.0);
    CHECK(concave_grad(scad, 4.0, 1.0) == -1.0);
    CHECK(concave_grad(scad, -4.0, 1.0) == 1.0);
    for (auto spec : {PenaltySpec::scad(), PenaltySpec::mcp(), PenaltySpec::l1()})
        CHECK(concave_grad(spec, 0.0, 1.3) == 0.0);
    CHECK(concave_grad(PenaltySpec::l1(), 5.0, 1.0) == 0.0);
}

TEST_CASE("decomposition, oddness and bounds over random draws") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const int fam = static_cast<int>(unit(rng) * 3.0);
        const PenaltySpec spec = fam == 0   ? PenaltySpec::scad(2.0 + 1e-3 + 4.0 * unit(rng))
                                 : fam == 1 ? PenaltySpec::mcp(1.0 + 1e-3 + 4.0 * unit(rng))
                                            : PenaltySpec::l1();
        const double lambda = 1e-3 + 5.0 * unit(rng);
        const double t = 30.0 * unit(rng) * unit(rng);
        const double p = spec.value(t, lambda);
        const double J = spec.concave_value(t, lambda);
        CHECK(std::abs(p - J - lambda * t) <= 1e-12 * std::max(1.0, p));

        const double beta = (unit(rng) - 0.5) * 20.0;
        CHECK(spec.concave_grad(-beta, lambda) == -spec.concave_grad(beta, lambda));
        CHECK(std::abs(spec.concave_grad(beta, lambda)) <= lambda);
        const double d = spec.deriv(t, lambda);
        CHECK(d >= 0.0);
        CHECK(d <= lambda);
        if (spec.family() != PenaltyFamily::L1 && t > spec.a() * lambda) CHECK(d == 0.0);
    }
}

TEST_CASE("derivative is continuous and nonincreasing near the knots") {
    for (auto spec : {PenaltySpec::scad(3.7), PenaltySpec::mcp(3.0)}) {
        const double lambda = 1.0;
        for (double knot : {lambda, spec.a() * lambda}) {
            double prev = spec.deriv(knot - 1e-3, lambda);
            for (int k = -999; k <= 1000; ++k) {
                const double t = knot + k * 1e-6;
                const double d = spec.deriv(t, lambda);
                CHECK(std::abs(d - prev) <= 1e-6);
                CHECK(d <= prev + 1e-15);
                prev = d;
            }
            CHECK(std::abs(spec.deriv(knot + 1e-12, lambda) - spec.deriv(knot, lambda)) <= 1e-8);
        }
    }
}

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(1.234, 0.0) == 1.234);
}

TEST_CASE("soft threshold matches a grid search") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> z(-8.0, 8.0);
    std::uniform_real_distribution<double> lam(0.0, 3.0);
    for (int k = 0; k < 40; ++k) {
        const double zz = z(rng);
        const double ll = lam(rng);
        CHECK(std::abs(soft_threshold(zz, ll) - testing::grid_soft_threshold(zz, ll)) <= 1e-3);
    }
}
