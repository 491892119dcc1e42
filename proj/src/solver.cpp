#include "ccpath/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "ccpath/diagnostics.hpp"
#include "ccpath/error.hpp"

namespace ccpath {

void SolverConfig::validate() const {
    require(tol > 0.0, ErrorKind::InvalidArgument, "solver tol must be positive");
    require(max_iter >= 1, ErrorKind::InvalidArgument, "solver max_iter must be at least 1");
    require(active_set_cycles >= 0, ErrorKind::InvalidArgument, "active_set_cycles must be nonnegative");
}

namespace {

// One pass of coordinate updates over `X` columns. Relies on x_j'x_j / n = 1,
// so each coordinate minimizer is a plain soft-threshold.
template <class IndexRange>
double sweep(const Matrix& X, const Vector& offsets, double lambda, double inv_n, Vector& beta, Vector& r,
             const IndexRange& indices) {
    double max_change = 0.0;
    for (const Index j : indices) {
        const auto xj = X.col(j);
        const double old = beta[j];
        const double rho = old + xj.dot(r) * inv_n;
        const double z = rho - offsets[j];
        // A correlation that sits on the threshold up to rounding stays at zero;
        // otherwise exact nulls (e.g. at lambda_max) pick up 1e-16 residue.
        const double updated = std::abs(z) - lambda <= 1e-13 * (std::abs(old) + lambda) ? 0.0 : soft_threshold(z, lambda);
        const double delta = updated - old;
        if (delta != 0.0) {
            r.noalias() -= delta * xj;
            beta[j] = updated;
            max_change = std::max(max_change, std::abs(delta));
        }
    }
    return max_change;
}

struct FullRange {
    Index p;
    struct It {
        Index j;
        Index operator*() const { return j; }
        It& operator++() {
            ++j;
            return *this;
        }
        bool operator!=(const It& o) const { return j != o.j; }
    };
    It begin() const { return {0}; }
    It end() const { return {p}; }
};

}  // namespace

FitResult solve_surrogate(const SurrogateProblem& prob, const Vector& warm_start, const SolverConfig& cfg) {
    const Dataset& data = prob.data;
    require(data.standardized, ErrorKind::NotStandardized, "solver needs a standardized dataset");
    require(prob.lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(prob.offsets.size() == data.p(), ErrorKind::DimensionMismatch, "offset length differs from p");
    require(warm_start.size() == data.p(), ErrorKind::DimensionMismatch, "warm start length differs from p");
    cfg.validate();
    const double lambda = prob.lambda;
    require(prob.offsets.cwiseAbs().maxCoeff() <= lambda * (1.0 + 1e-12), ErrorKind::InvalidArgument,
            "linear offsets must satisfy |g_j| <= lambda");

    const double inv_n = 1.0 / static_cast<double>(data.n());
    FitResult fit;
    fit.lambda = lambda;
    fit.beta = warm_start;
    Vector r = data.y;
    if (!warm_start.isZero(0.0)) r.noalias() -= data.X * warm_start;

    const double kkt_target = 10.0 * cfg.tol;
    const FullRange all{data.p()};
    std::vector<Index> active;
    int iter = 0;
    double change = 0.0;
    bool converged = false;
    while (iter < cfg.max_iter) {
        change = sweep(data.X, prob.offsets, lambda, inv_n, fit.beta, r, all);
        ++iter;
        if (change <= cfg.tol) {
            fit.kkt_residual = surrogate_kkt_residual(fit.beta, r, data, prob.offsets, lambda);
            if (fit.kkt_residual <= kkt_target) {
                converged = true;
                break;
            }
            continue;
        }
        active.clear();
        for (Index j = 0; j < data.p(); ++j)
            if (fit.beta[j] != 0.0) active.push_back(j);
        for (int c = 0; c < cfg.active_set_cycles && iter < cfg.max_iter; ++c) {
            const double ch = sweep(data.X, prob.offsets, lambda, inv_n, fit.beta, r, active);
            ++iter;
            if (ch <= cfg.tol) break;
        }
    }
    if (!converged) fit.kkt_residual = surrogate_kkt_residual(fit.beta, r, data, prob.offsets, lambda);

    fit.iterations = iter;
    fit.max_coord_change = change;
    fit.converged = converged;
    fit.sse = r.squaredNorm();
    fit.support = support_of(fit.beta);
    return fit;
}

FitResult lasso(const Dataset& data, double lambda, const SolverConfig& cfg) {
    return lasso(data, lambda, Vector::Zero(data.p()), cfg);
}

FitResult lasso(const Dataset& data, double lambda, const Vector& warm_start, const SolverConfig& cfg) {
    return solve_surrogate(SurrogateProblem{data, Vector::Zero(data.p()), lambda}, warm_start, cfg);
}

namespace {

Vector linearize(const PenaltySpec& spec, const Vector& beta, double lambda) {
    Vector g(beta.size());
    for (Index j = 0; j < beta.size(); ++j) g[j] = spec.concave_grad(beta[j], lambda);
    return g;
}

}  // namespace

FitResult calibrated_cccp(const Dataset& data, const PenaltySpec& spec, double lambda, double tau,
                          const SolverConfig& cfg, const Vector* step1_warm) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(tau > 0.0 && tau <= 1.0, ErrorKind::InvalidArgument, "tau must lie in (0, 1]");

    const Vector zero = Vector::Zero(data.p());
    FitResult step1 = lasso(data, tau * lambda, step1_warm ? *step1_warm : zero, cfg);
    FitResult step2 =
        solve_surrogate(SurrogateProblem{data, linearize(spec, step1.beta, lambda), lambda}, step1.beta, cfg);

    step2.iterations += step1.iterations;
    step2.converged = step1.converged && step2.converged;
    step2.tau = tau;
    step2.kkt_residual = kkt_violation(step2.beta, data, spec, lambda).max_violation();
    step2.step1_beta = std::move(step1.beta);
    return step2;
}

FitResult cccp_full(const Dataset& data, const PenaltySpec& spec, double lambda, const SolverConfig& cfg,
                    const CccpOptions& opts) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(opts.max_outer >= 1, ErrorKind::InvalidArgument, "max_outer must be at least 1");

    Vector current = opts.init ? *opts.init : Vector::Zero(data.p());
    require(current.size() == data.p(), ErrorKind::DimensionMismatch, "initial value length differs from p");
    if (opts.objective_trace) {
        opts.objective_trace->clear();
        opts.objective_trace->push_back(penalized_objective(data, spec, current, lambda));
    }

    FitResult fit;
    bool inner_ok = true;
    bool converged = false;
    for (int k = 0; k < opts.max_outer; ++k) {
        const bool use_first_warm = k == 0 && opts.first_step_warm && current.isZero(0.0);
        const Vector& warm = use_first_warm ? *opts.first_step_warm : current;
        FitResult next = solve_surrogate(SurrogateProblem{data, linearize(spec, current, lambda), lambda}, warm, cfg);
        inner_ok = inner_ok && next.converged;
        const double change = (next.beta - current).cwiseAbs().maxCoeff();
        if (k == 0) fit.step1_beta = next.beta;
        current = next.beta;
        fit.beta = std::move(next.beta);
        fit.sse = next.sse;
        fit.max_coord_change = change;
        if (opts.objective_trace) opts.objective_trace->push_back(penalized_objective(data, spec, current, lambda));
        fit.iterations = k + 1;
        if (change <= cfg.tol) {
            converged = true;
            break;
        }
    }
    fit.lambda = lambda;
    fit.converged = converged && inner_ok;
    fit.support = support_of(fit.beta);
    fit.kkt_residual = kkt_violation(fit.beta, data, spec, lambda).max_violation();
    return fit;
}

double penalized_objective(const Dataset& data, const PenaltySpec& spec, const Vector& beta, double lambda) {
    const double loss = (data.y - data.X * beta).squaredNorm() / (2.0 * static_cast<double>(data.n()));
    double pen = 0.0;
    for (Index j = 0; j < beta.size(); ++j) pen += spec.value(std::abs(beta[j]), lambda);
    return loss + pen;
}

double lambda_max(const Dataset& data) {
    return (data.X.transpose() * data.y).cwiseAbs().maxCoeff() / static_cast<double>(data.n());
}

std::vector<double> log_grid(double top, int n_points, double ratio) {
    require(top > 0.0, ErrorKind::InvalidArgument, "top of the lambda grid must be positive");
    require(n_points >= 1, ErrorKind::InvalidArgument, "grid needs at least one point");
    require(ratio > 0.0 && ratio < 1.0, ErrorKind::InvalidArgument, "grid ratio must lie in (0, 1)");
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    grid[0] = top;
    for (int k = 1; k < n_points; ++k)
        grid[static_cast<std::size_t>(k)] =
            top * std::pow(ratio, static_cast<double>(k) / static_cast<double>(n_points - 1));
    return grid;
}

std::vector<double> lambda_grid(const Dataset& data, int n_points, double ratio) {
    require(data.standardized, ErrorKind::NotStandardized, "lambda grid needs a standardized dataset");
    return log_grid(lambda_max(data), n_points, ratio);
}

TauRule TauRule::parse(std::string_view text) {
    if (text == "invlogn") return inv_log_n();
    if (text == "lambda") return equals_lambda();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    require(ec == std::errc{} && ptr == text.data() + text.size(), ErrorKind::InvalidArgument,
            "tau must be 'invlogn', 'lambda' or a number, got '" + std::string(text) + "'");
    require(v > 0.0 && v <= 1.0, ErrorKind::InvalidArgument, "fixed tau must lie in (0, 1]");
    return fixed(v);
}

double TauRule::resolve(Index n, double lambda) const {
    switch (kind) {
        case Kind::InvLogN: return 1.0 / std::log(static_cast<double>(n));
        case Kind::EqualsLambda: return std::min(lambda, 1.0);
        case Kind::Fixed: break;
    }
    return value;
}

SolutionPath path(const Dataset& data, const PenaltySpec& spec, std::span<const double> grid, TauRule tau_rule,
                  const SolverConfig& cfg, std::optional<std::size_t> max_support) {
    require(!grid.empty(), ErrorKind::InvalidArgument, "lambda grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        require(grid[k] < grid[k - 1], ErrorKind::InvalidArgument, "lambda grid must be strictly decreasing");

    SolutionPath out;
    out.n = data.n();
    out.p = data.p();
    out.y_norm2 = data.y.squaredNorm();
    const double inv_n = 1.0 / static_cast<double>(data.n());
    Vector warm = Vector::Zero(data.p());
    for (const double lambda : grid) {
        FitResult fit = calibrated_cccp(data, spec, lambda, tau_rule.resolve(data.n(), lambda), cfg, &warm);
        warm = *fit.step1_beta;
        out.lambdas.push_back(lambda);
        out.sigma2.push_back(fit.sse * inv_n);
        out.hbic.emplace_back();
        const std::size_t s = fit.support.size();
        out.fits.push_back(std::move(fit));
        if (max_support && s > *max_support) break;
    }
    return out;
}

}  // namespace ccpath
