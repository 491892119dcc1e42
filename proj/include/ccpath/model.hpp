#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ccpath/error.hpp"

namespace ccpath {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using Support = std::vector<Index>;

/// Coefficients expressed in the coordinates of the raw (unstandardized) input.
struct OriginalCoefficients {
    Vector coef;
    double intercept = 0.0;
};

/// Response and design after column standardization.
///
/// Every column of `X` satisfies x'x/n = 1. When `centered` is set, `y` and the
/// columns of `X` have mean zero, which amounts to an unpenalized intercept.
/// Coefficients are kept on the standardized scale; `to_original` maps them
/// back. Treat instances as immutable once built.
struct Dataset {
    Vector y;
    Matrix X;
    Vector col_scale;
    Vector col_center;
    double y_center = 0.0;
    bool centered = false;
    bool standardized = false;

    Index n() const noexcept { return X.rows(); }
    Index p() const noexcept { return X.cols(); }

    OriginalCoefficients to_original(const Vector& beta) const;
    /// Inverse of `to_original` for the slope part.
    Vector to_standardized(const Vector& coef) const;
};

Dataset standardize(const Matrix& raw_X, const Vector& raw_y, bool center = true);

struct TrueModel {
    Vector beta_star;
    Support support;
    std::size_t q = 0;
    double d_star = 0.0;

    static TrueModel from_beta(const Vector& beta_star);
};

struct Metrics {
    double tp = 0.0;
    double fp = 0.0;
    double tm = 0.0;
    double mse = 0.0;
    std::size_t count = 0;
};

/// One coefficient vector together with convergence and diagnostic metadata.
struct FitResult {
    Vector beta;
    Support support;
    int iterations = 0;
    double max_coord_change = 0.0;
    bool converged = true;
    double kkt_residual = 0.0;
    double lambda = 0.0;
    std::optional<double> tau;
    double sse = 0.0;
    /// Step-1 (Lasso at tau*lambda) solution retained by the calibrated driver,
    /// or the first-iteration Lasso for the full CCCP driver.
    std::optional<Vector> step1_beta;
};

Support support_of(const Vector& beta);

FitResult oracle_fit(const Dataset& data, std::span<const Index> support);

Metrics selection_metrics(std::span<const Vector> estimates, const TrueModel& truth);

}  // namespace ccpath
