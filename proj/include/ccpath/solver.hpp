#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ccpath/model.hpp"
#include "ccpath/penalty.hpp"

namespace ccpath {

struct SolverConfig {
    double tol = 1e-7;
    int max_iter = 10000;
    /// Rounds over the active set between two full sweeps.
    int active_set_cycles = 10;

    void validate() const;
};

/// (2n)^-1 ||y - X b||^2 + offsets'b + lambda ||b||_1, the convex majorizer
/// obtained by linearizing the concave part of the penalty.
struct SurrogateProblem {
    const Dataset& data;
    Vector offsets;
    double lambda;
};

/// Cyclic coordinate descent with an active-set strategy. A result that hit
/// `max_iter` is returned with `converged == false`.
FitResult solve_surrogate(const SurrogateProblem& prob, const Vector& warm_start, const SolverConfig& cfg);

FitResult lasso(const Dataset& data, double lambda, const SolverConfig& cfg = {});
FitResult lasso(const Dataset& data, double lambda, const Vector& warm_start, const SolverConfig& cfg = {});

/// Two CCCP steps: a Lasso at tau*lambda from zero, then one surrogate solve at
/// lambda linearized at the step-1 solution.
FitResult calibrated_cccp(const Dataset& data, const PenaltySpec& spec, double lambda, double tau,
                          const SolverConfig& cfg = {}, const Vector* step1_warm = nullptr);

struct CccpOptions {
    int max_outer = 50;
    /// Starting point beta^(0); zero when absent.
    std::optional<Vector> init;
    /// Warm start for the inner solver of the first outer step only. With a zero
    /// start that step is a Lasso, whose minimizer does not depend on it.
    std::optional<Vector> first_step_warm;
    /// Penalized objective after each outer iteration (entry 0 is beta^(0)).
    std::vector<double>* objective_trace = nullptr;
};

/// Uncalibrated CCCP iterated until the outer change is below tol.
FitResult cccp_full(const Dataset& data, const PenaltySpec& spec, double lambda, const SolverConfig& cfg = {},
                    const CccpOptions& opts = {});

/// (2n)^-1 ||y - X b||^2 + sum_j p(|b_j|).
double penalized_objective(const Dataset& data, const PenaltySpec& spec, const Vector& beta, double lambda);

/// ||n^-1 X'y||_inf: the smallest lambda at which the Lasso solution is zero.
double lambda_max(const Dataset& data);

/// Log-spaced decreasing grid from lambda_max down to ratio*lambda_max.
std::vector<double> lambda_grid(const Dataset& data, int n_points = 100, double ratio = 0.01);
std::vector<double> log_grid(double top, int n_points, double ratio);

struct TauRule {
    enum class Kind { InvLogN, EqualsLambda, Fixed };
    Kind kind = Kind::InvLogN;
    double value = 0.0;

    static TauRule inv_log_n() { return {Kind::InvLogN, 0.0}; }
    static TauRule equals_lambda() { return {Kind::EqualsLambda, 0.0}; }
    static TauRule fixed(double tau) { return {Kind::Fixed, tau}; }
    /// Accepts "invlogn", "lambda" or a number in (0, 1].
    static TauRule parse(std::string_view text);

    /// tau for a given sample size and lambda; EqualsLambda is capped at 1.
    double resolve(Index n, double lambda) const;
};

struct SolutionPath {
    std::vector<double> lambdas;
    std::vector<FitResult> fits;
    std::vector<double> sigma2;
    std::vector<std::optional<double>> hbic;
    Index n = 0;
    Index p = 0;
    double y_norm2 = 0.0;

    std::size_t size() const noexcept { return lambdas.size(); }
};

/// One calibrated fit per grid point. Step 1 warm-starts from the previous
/// grid point's step-1 solution, step 2 from the current step-1 solution.
/// Stops early, after the first point whose support exceeds `max_support`
/// when that is set.
SolutionPath path(const Dataset& data, const PenaltySpec& spec, std::span<const double> grid, TauRule tau_rule,
                  const SolverConfig& cfg = {}, std::optional<std::size_t> max_support = std::nullopt);

}  // namespace ccpath
