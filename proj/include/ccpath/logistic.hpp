#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ccpath/model.hpp"
#include "ccpath/penalty.hpp"
#include "ccpath/selection.hpp"
#include "ccpath/solver.hpp"

namespace ccpath {

/// Binary response with a standardized design. With `intercept` set the
/// columns are centered and an unpenalized intercept is fitted.
struct BinaryDataset {
    Vector y;
    Matrix X;
    Vector col_scale;
    Vector col_center;
    bool intercept = false;

    Index n() const noexcept { return X.rows(); }
    Index p() const noexcept { return X.cols(); }

    OriginalCoefficients to_original(const Vector& beta, double intercept_value) const;
};

BinaryDataset make_binary_dataset(const Matrix& raw_X, const Vector& raw_y, bool intercept);

struct LogisticFit {
    Vector beta;
    double intercept_value = 0.0;
    double deviance = 0.0;
    int iterations_outer = 0;
    int iterations_inner = 0;
    bool converged = true;
    double kkt_residual = 0.0;
    double lambda = 0.0;
    std::optional<double> tau;
    Support support;
    std::optional<Vector> step1_beta;
    double step1_intercept = 0.0;
};

/// n^-1 sum_i [log(1 + exp(eta_i)) - y_i eta_i], eta = intercept + X beta.
double neg_loglik(const Vector& beta, double intercept, const BinaryDataset& data);

/// n^-1 sum [log(1 + exp(eta)) - y eta] + sum_j p(|beta_j|).
double logistic_penalized_objective(const BinaryDataset& data, const PenaltySpec& spec, const Vector& beta,
                                    double intercept, double lambda);

/// ||n^-1 X'(y - p0)||_inf with p0 the null-model fitted probability.
double logistic_lambda_max(const BinaryDataset& data);

/// Minimizes the negative log-likelihood plus offsets'beta + lambda ||beta||_1
/// by IRLS: each round solves a weighted Lasso by coordinate descent and the
/// step is halved (up to 20 times) while the objective would increase.
LogisticFit logistic_solve_surrogate(const BinaryDataset& data, const Vector& offsets, double lambda,
                                     const Vector& warm_beta, double warm_intercept, const SolverConfig& cfg = {});

LogisticFit logistic_lasso(const BinaryDataset& data, double lambda, const SolverConfig& cfg = {},
                           const LogisticFit* warm = nullptr);

LogisticFit logistic_calibrated_cccp(const BinaryDataset& data, const PenaltySpec& spec, double lambda, double tau,
                                     const SolverConfig& cfg = {}, const LogisticFit* step1_warm = nullptr);

/// Unpenalized maximum likelihood on the given support (zeros elsewhere).
LogisticFit logistic_oracle_fit(const BinaryDataset& data, std::span<const Index> support, const SolverConfig& cfg = {});

/// Same conditions as `kkt_violation` with the score n^-1 X'(y - p_hat) in
/// place of the residual correlation.
double logistic_kkt_violation(const LogisticFit& fit, const BinaryDataset& data, const PenaltySpec& spec,
                              double lambda);

/// 1 iff x'beta + intercept > 0, i.e. fitted probability strictly above 1/2.
int predict_class(const LogisticFit& fit, const Vector& x);
int predict_class(const OriginalCoefficients& model, const Vector& x);

double misclassification_rate(const OriginalCoefficients& model, const Matrix& X, const Vector& y);

/// deviance/n + model_size * C_n * log(p) / n.
double hbic_logistic(double deviance, std::size_t model_size, Index n, Index p, double c_n);

struct LogisticPath {
    std::vector<double> lambdas;
    std::vector<LogisticFit> fits;
    /// Set when the path was cut short because the weights collapsed.
    bool separated = false;
    /// Set when the path stopped at a point whose solve ran out of sweeps,
    /// which happens as the fit approaches separation. That point is dropped.
    bool saturated = false;
};

LogisticPath logistic_path(const BinaryDataset& data, const PenaltySpec& spec, std::span<const double> grid,
                           TauRule tau_rule, const SolverConfig& cfg = {},
                           std::optional<std::size_t> max_support = std::nullopt);

struct LogisticSelection {
    std::size_t index = 0;
    double lambda = 0.0;
    double score = 0.0;
    LogisticFit fit;
};

/// Minimizes hbic_logistic over points with |support| <= K_n; ties go to the larger lambda.
LogisticSelection select_hbic_logistic(const LogisticPath& path, Index n, Index p, const HbicConfig& cfg);

}  // namespace ccpath
