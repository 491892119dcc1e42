#pragma once

// Test-only reference computations. Nothing here calls into the solver; the
// point is to have a second route to every number the solver produces.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ccpath/model.hpp"

namespace ccpath::testing {

inline Matrix gaussian_matrix(Index n, Index p, double rho, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix X(n, p);
    const double innov = std::sqrt(1.0 - rho * rho);
    for (Index i = 0; i < n; ++i) {
        double prev = normal(rng);
        X(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = rho * prev + innov * normal(rng);
            X(i, j) = prev;
        }
    }
    return X;
}

struct Instance {
    Dataset data;
    TrueModel truth;
};

/// y = X beta* + sigma * eps with beta* having `q` leading entries drawn from
/// +-[lo, hi]; the design is standardized without centering.
inline Instance linear_instance(Index n, Index p, Index q, double sigma, double rho, std::uint64_t seed,
                                double lo = 1.0, double hi = 3.0) {
    std::mt19937_64 rng(seed);
    Matrix X = gaussian_matrix(n, p, rho, rng);
    // Standardize up front so beta* lives on the scale the solver sees.
    for (Index j = 0; j < p; ++j) X.col(j) /= std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution sign(0.5);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < q; ++j) beta[j] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector y = X * beta;
    for (Index i = 0; i < n; ++i) y[i] += sigma * normal(rng);
    return {standardize(X, y, false), TrueModel::from_beta(beta)};
}

/// Minimizer of 0.5*b^2 - z*b + lambda*|b| by scanning b in [-10, 10] at step 1e-4.
inline double grid_soft_threshold(double z, double lambda) {
    double best_b = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (long k = -100000; k <= 100000; ++k) {
        const double b = static_cast<double>(k) * 1e-4;
        const double v = 0.5 * b * b - z * b + lambda * std::abs(b);
        if (v < best) {
            best = v;
            best_b = b;
        }
    }
    return best_b;
}

/// Value of (2n)^-1||y - Xb||^2 + g'b + lambda||b||_1 for p = 2, written via the
/// Gram matrix so a grid can be scanned cheaply.
struct Quadratic2d {
    double g11, g12, g22, c1, c2, off1, off2, lambda;

    double operator()(double b1, double b2) const {
        return 0.5 * (g11 * b1 * b1 + 2.0 * g12 * b1 * b2 + g22 * b2 * b2) - c1 * b1 - c2 * b2 + off1 * b1 +
               off2 * b2 + lambda * (std::abs(b1) + std::abs(b2));
    }
};

/// Coarse-to-fine grid search over [-10, 10]^2: step 1e-2 everywhere, then
/// step 1e-4 in a +-0.02 window around the coarse winner (valid because the
/// objective is convex).
inline Eigen::Vector2d grid_minimize_2d(const Quadratic2d& f) {
    double best = std::numeric_limits<double>::infinity();
    double b1s = 0.0;
    double b2s = 0.0;
    for (int i = -1000; i <= 1000; ++i) {
        const double b1 = i * 1e-2;
        for (int j = -1000; j <= 1000; ++j) {
            const double b2 = j * 1e-2;
            const double v = f(b1, b2);
            if (v < best) {
                best = v;
                b1s = b1;
                b2s = b2;
            }
        }
    }
    const double c1 = b1s;
    const double c2 = b2s;
    for (int i = -200; i <= 200; ++i) {
        const double b1 = c1 + i * 1e-4;
        for (int j = -200; j <= 200; ++j) {
            const double b2 = c2 + j * 1e-4;
            const double v = f(b1, b2);
            if (v < best) {
                best = v;
                b1s = b1;
                b2s = b2;
            }
        }
    }
    return {b1s, b2s};
}

/// Smallest eigenvalue of n^-1 X_B'X_B over every superset B of A0 with
/// |B| <= m, enumerating all subset sizes through bitmasks.
inline double brute_xi_min(const Matrix& X, const std::vector<Index>& A0, Index m) {
    const Index p = X.cols();
    const auto n = static_cast<double>(X.rows());
    unsigned base = 0;
    for (Index j : A0) base |= 1u << j;
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << p); ++mask) {
        if ((mask & base) != base) continue;
        std::vector<Index> B;
        for (Index j = 0; j < p; ++j)
            if (mask & (1u << j)) B.push_back(j);
        if (static_cast<Index>(B.size()) > m) continue;
        Matrix XB(X.rows(), static_cast<Index>(B.size()));
        for (std::size_t k = 0; k < B.size(); ++k) XB.col(static_cast<Index>(k)) = X.col(B[k]);
        const Matrix G = XB.transpose() * XB / n;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
        best = std::min(best, eig.eigenvalues()[0]);
    }
    return best;
}

/// Least squares on the given columns by the normal equations; independent of
/// the SVD route used by oracle_fit.
inline Vector normal_equations_fit(const Matrix& X, const Vector& y, const std::vector<Index>& support) {
    Vector beta = Vector::Zero(X.cols());
    if (support.empty()) return beta;
    Matrix XS(X.rows(), static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) XS.col(static_cast<Index>(k)) = X.col(support[k]);
    const Vector coef = (XS.transpose() * XS).ldlt().solve(XS.transpose() * y);
    for (std::size_t k = 0; k < support.size(); ++k) beta[support[k]] = coef[static_cast<Index>(k)];
    return beta;
}

}  // namespace ccpath::testing
