#include "ccpath/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ccpath/error.hpp"

namespace ccpath {

KktReport kkt_violation(const Vector& beta, const Dataset& data, const PenaltySpec& spec, double lambda,
                        double tolerance) {
    require(data.standardized, ErrorKind::NotStandardized, "kkt check needs a standardized dataset");
    require(beta.size() == data.p(), ErrorKind::DimensionMismatch, "coefficient length differs from p");
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");

    const double inv_n = 1.0 / static_cast<double>(data.n());
    const Vector r = data.y - data.X * beta;
    const Vector corr = (data.X.transpose() * r) * inv_n;

    KktReport rep;
    rep.tolerance = tolerance;
    double worst = -1.0;
    for (Index j = 0; j < beta.size(); ++j) {
        double v;
        if (beta[j] != 0.0) {
            const double target = std::copysign(spec.deriv(std::abs(beta[j]), lambda), beta[j]);
            v = std::abs(corr[j] - target);
            rep.max_violation_nonzero = std::max(rep.max_violation_nonzero, v);
        } else {
            v = std::max(0.0, std::abs(corr[j]) - lambda);
            rep.max_violation_zero = std::max(rep.max_violation_zero, v);
        }
        if (v > worst) {
            worst = v;
            rep.worst_index = j;
        }
    }
    rep.satisfied = rep.max_violation() <= tolerance;
    return rep;
}

double surrogate_kkt_residual(const Vector& beta, const Vector& residual, const Dataset& data,
                              const Vector& offsets, double lambda) {
    const double inv_n = 1.0 / static_cast<double>(data.n());
    double worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double c = data.X.col(j).dot(residual) * inv_n - offsets[j];
        const double v = beta[j] != 0.0 ? std::abs(c - std::copysign(lambda, beta[j]))
                                        : std::max(0.0, std::abs(c) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

double xi_min(const Dataset& data, std::span<const Index> A0, Index m) {
    const Index p = data.p();
    require(p <= kXiMinMaxP, ErrorKind::TooLargeForBruteForce,
            "exhaustive sparse-eigenvalue search is capped at p <= " + std::to_string(kXiMinMaxP) +
                " (got p = " + std::to_string(p) + ")");
    std::vector<bool> in_base(static_cast<std::size_t>(p), false);
    for (Index j : A0) {
        require(j >= 0 && j < p, ErrorKind::InvalidArgument, "support index out of range");
        in_base[static_cast<std::size_t>(j)] = true;
    }
    const auto q = static_cast<Index>(std::count(in_base.begin(), in_base.end(), true));
    require(m >= q, ErrorKind::InvalidArgument, "m must be at least |A0|");
    require(m >= 1, ErrorKind::InvalidArgument, "m must be positive");

    const Matrix gram = (data.X.transpose() * data.X) / static_cast<double>(data.n());
    std::vector<Index> rest;
    std::vector<Index> base;
    for (Index j = 0; j < p; ++j) (in_base[static_cast<std::size_t>(j)] ? base : rest).push_back(j);

    // Adding a column can only lower the smallest eigenvalue (Cauchy interlacing),
    // so the minimum is attained by supersets of the largest admissible size.
    const Index size = std::min(m, p);
    const auto extra = static_cast<std::size_t>(size - q);

    std::vector<std::size_t> pick(extra);
    for (std::size_t k = 0; k < extra; ++k) pick[k] = k;
    std::vector<Index> B(base);
    B.resize(static_cast<std::size_t>(size));
    Matrix sub(size, size);
    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    double best = std::numeric_limits<double>::infinity();

    while (true) {
        for (std::size_t k = 0; k < extra; ++k) B[base.size() + k] = rest[pick[k]];
        for (Index a = 0; a < size; ++a)
            for (Index b = 0; b < size; ++b)
                sub(a, b) = gram(B[static_cast<std::size_t>(a)], B[static_cast<std::size_t>(b)]);
        eig.compute(sub, Eigen::EigenvaluesOnly);
        best = std::min(best, eig.eigenvalues()[0]);

        // Next combination in lexicographic order.
        std::size_t k = extra;
        while (k > 0 && pick[k - 1] == rest.size() - extra + (k - 1)) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t t = k; t < extra; ++t) pick[t] = pick[t - 1] + 1;
    }
    return std::max(best, 0.0);
}

L2BoundCheck l2_bound_check(const Vector& beta_hat, const Dataset& data, const TrueModel& truth, double lambda,
                            double u_n) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(u_n > 0.0, ErrorKind::InvalidArgument, "u_n must be positive");
    require(truth.q > 0, ErrorKind::InvalidArgument, "true model must have a nonempty support");
    const auto q = static_cast<double>(truth.q);
    const auto nnz = static_cast<double>(support_of(beta_hat).size());
    require(nnz <= q * u_n, ErrorKind::InvalidArgument,
            "estimate has " + std::to_string(static_cast<long>(nnz)) + " nonzeros, more than q*u_n");

    const double qu_star = q * (u_n + 1.0);
    L2BoundCheck out;
    out.m = std::min<Index>(static_cast<Index>(std::floor(qu_star)), data.p());
    out.xi = xi_min(data, truth.support, out.m);
    const FitResult oracle = oracle_fit(data, truth.support);
    out.lhs = (beta_hat - oracle.beta).norm();
    out.rhs = out.xi > 0.0 ? 2.0 * lambda * std::sqrt(qu_star) / out.xi : std::numeric_limits<double>::infinity();
    out.holds = out.lhs <= out.rhs;
    return out;
}

}  // namespace ccpath
