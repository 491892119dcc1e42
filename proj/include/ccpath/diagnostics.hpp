#pragma once

#include <span>

#include "ccpath/model.hpp"
#include "ccpath/penalty.hpp"

namespace ccpath {

/// Stationarity of a coefficient vector for the penalized least-squares objective
/// (2n)^-1 ||y - X b||^2 + sum_j p(|b_j|).
struct KktReport {
    double max_violation_nonzero = 0.0;
    double max_violation_zero = 0.0;
    Index worst_index = -1;
    double tolerance = 0.0;
    bool satisfied = true;

    double max_violation() const noexcept {
        return max_violation_nonzero > max_violation_zero ? max_violation_nonzero : max_violation_zero;
    }
};

/// Nonzero coordinates must satisfy n^-1 x_j'r = sign(b_j) p'(|b_j|); zero
/// coordinates need |n^-1 x_j'r| <= lambda.
KktReport kkt_violation(const Vector& beta, const Dataset& data, const PenaltySpec& spec, double lambda,
                        double tolerance = 1e-6);

/// KKT residual of the convex surrogate
/// (2n)^-1 ||y - X b||^2 + g'b + lambda ||b||_1 .
double surrogate_kkt_residual(const Vector& beta, const Vector& residual, const Dataset& data,
                              const Vector& offsets, double lambda);

/// Largest dimension accepted by the exhaustive sparse-eigenvalue search.
inline constexpr Index kXiMinMaxP = 25;

/// Smallest eigenvalue of n^-1 X_B'X_B over every B containing `A0` with |B| <= m,
/// found by exhaustive enumeration.
double xi_min(const Dataset& data, std::span<const Index> A0, Index m);

struct L2BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double xi = 0.0;
    Index m = 0;
    bool holds = false;
};

/// Compares ||beta_hat - oracle|| against 2*lambda*sqrt(q u*) / xi_min(q u*),
/// u* = u_n + 1. Requires ||beta_hat||_0 <= q*u_n.
L2BoundCheck l2_bound_check(const Vector& beta_hat, const Dataset& data, const TrueModel& truth, double lambda,
                            double u_n);

}  // namespace ccpath
