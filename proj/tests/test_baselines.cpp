#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ccpath/baselines.hpp"
#include "ccpath/simulation.hpp"
#include "support/oracles.hpp"

using namespace ccpath;

namespace {

bool contains(const Support& s, Index j) { return std::find(s.begin(), s.end(), j) != s.end(); }

// Columns 1..k of the 16-row Sylvester-Hadamard matrix.
Matrix hadamard_columns(Index k) {
    Matrix H(1, 1);
    H(0, 0) = 1.0;
    while (H.rows() < 16) {
        const Index m = H.rows();
        Matrix next(2 * m, 2 * m);
        next << H, H, H, -H;
        H = next;
    }
    return H.middleCols(1, k);
}

}  // namespace

TEST_CASE("hlasso with every coefficient under the threshold is zero") {
    auto inst = testing::linear_instance(50, 30, 3, 1.0, 0.3, 4);
    const double lambda = 0.5 * lambda_max(inst.data);
    const FitResult fit = hlasso_fit(inst.data, lambda, HlassoConfig{100.0});
    CHECK(fit.beta.isZero(0.0));
    CHECK(fit.support.empty());
    REQUIRE(fit.step1_beta.has_value());
    CHECK(!fit.step1_beta->isZero(0.0));
}

TEST_CASE("hlasso recovers the truth on a noiseless orthonormal design") {
    const Matrix X = hadamard_columns(12);
    Vector beta = Vector::Zero(12);
    beta[2] = 4.0;
    beta[5] = -3.0;
    beta[9] = 2.5;
    const Dataset d = standardize(X, X * beta, false);
    const FitResult fit = hlasso_fit(d, 0.3, HlassoConfig{});
    CHECK((fit.beta - beta).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(fit.support == Support{2, 5, 9});
}

TEST_CASE("hlasso support is inside the Lasso support and the refit is orthogonal") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto inst = testing::linear_instance(60, 80, 4, 1.0, 0.5, 3000 + seed);
        const double lambda = 0.1 * lambda_max(inst.data);
        const FitResult fit = hlasso_fit(inst.data, lambda, HlassoConfig{0.5});
        REQUIRE(fit.step1_beta.has_value());
        const Support lasso_support = support_of(*fit.step1_beta);
        for (Index j : fit.support) {
            CHECK(contains(lasso_support, j));
            CHECK(std::abs((*fit.step1_beta)[j]) > 0.5 * lambda);
        }
        const Vector r = inst.data.y - inst.data.X * fit.beta;
        for (Index j : fit.support) CHECK(std::abs(inst.data.X.col(j).dot(r)) <= 1e-8 * 60.0);
    }
}

TEST_CASE("hlasso argument and survivor checks") {
    auto inst = testing::linear_instance(12, 60, 3, 1.0, 0.0, 21);
    CHECK_THROWS_AS((void)hlasso_fit(inst.data, 0.0, HlassoConfig{}), Error);
    CHECK_THROWS_AS((void)hlasso_fit(inst.data, 0.1, HlassoConfig{0.0}), Error);

    // At a tiny lambda the Lasso interpolates with n nonzeros, all of which
    // clear a tiny threshold.
    SolverConfig cfg;
    cfg.max_iter = 100000;
    const double lambda = 1e-4 * lambda_max(inst.data);
    REQUIRE(lasso(inst.data, lambda, cfg).support.size() == 12);
    try {
        (void)hlasso_fit(inst.data, lambda, HlassoConfig{1e-6}, cfg);
        FAIL("expected TooManySurvivors");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooManySurvivors);
    }
}

TEST_CASE("hlasso path stops before the refit becomes ill-posed") {
    auto inst = testing::linear_instance(30, 100, 3, 1.0, 0.3, 22);
    const auto grid = lambda_grid(inst.data, 60, 0.001);
    const HlassoPath hp = hlasso_path(inst.data, grid, HlassoConfig{0.1});
    REQUIRE(hp.path.size() >= 1);
    CHECK(hp.lasso_betas.size() == hp.path.size());
    for (const FitResult& f : hp.path.fits) CHECK(static_cast<Index>(f.support.size()) <= 29);
    for (std::size_t k = 1; k < hp.path.size(); ++k) CHECK(hp.path.lambdas[k] < hp.path.lambdas[k - 1]);
}

TEST_CASE("hlasso_path_select on one point and on noiseless data") {
    auto inst = testing::linear_instance(50, 40, 3, 1.0, 0.3, 31);
    const std::vector<double> one{0.2};
    const Selection s = hlasso_path_select(inst.data, one, HlassoConfig{}, HbicConfig{});
    CHECK(s.index == 0);
    CHECK(s.lambda == 0.2);

    SimDesign design = scenario("case1a");
    // A noiseless fit interpolates y at the oracle support, so HBIC would
    // reject it; a whisper of noise keeps the score finite.
    design.sigma = 1e-3;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const GeneratedData gen = gen_design(design, rep);
        const Dataset d = standardize(gen.X, gen.y, false);
        const auto grid = lambda_grid(d, 100, 0.01);
        const Selection sel = hlasso_path_select(d, grid, HlassoConfig{}, HbicConfig{});
        CHECK(sel.fit.support == gen.truth.support);
    }
}

TEST_CASE("cross-validation fitters") {
    auto inst = testing::linear_instance(60, 40, 3, 1.0, 0.3, 41);
    const double lambda = 0.2 * lambda_max(inst.data);
    const FitResult a = lasso_cv_fitter(SolverConfig{})(inst.data, lambda, nullptr);
    CHECK((a.beta - lasso(inst.data, lambda).beta).cwiseAbs().maxCoeff() <= 1e-6);

    const CvFitter scad = cccp_cv_fitter(PenaltySpec::scad(), SolverConfig{});
    const FitResult cold = scad(inst.data, lambda, nullptr);
    const FitResult prev = scad(inst.data, 1.3 * lambda, nullptr);
    const FitResult warm = scad(inst.data, lambda, &prev);
    CHECK((cold.beta - warm.beta).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK((cold.beta - cccp_full(inst.data, PenaltySpec::scad(), lambda).beta).cwiseAbs().maxCoeff() <= 1e-12);
}
