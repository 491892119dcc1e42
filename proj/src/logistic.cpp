#include "ccpath/logistic.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <string>

#include "ccpath/error.hpp"

namespace ccpath {

namespace {

constexpr double kSeparationWeight = 1e-10;
constexpr int kMaxHalvings = 20;

// log(1 + exp(eta)) without overflow.
double log1pexp(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double mean_loss(const Vector& eta, const Vector& y) {
    double s = 0.0;
    for (Index i = 0; i < eta.size(); ++i) s += log1pexp(eta[i]) - y[i] * eta[i];
    return s / static_cast<double>(eta.size());
}

double surrogate_objective(const Vector& eta, const Vector& y, const Vector& offsets, const Vector& beta,
                           double lambda) {
    return mean_loss(eta, y) + offsets.dot(beta) + lambda * beta.lpNorm<1>();
}

double score_residual(const BinaryDataset& data, const Vector& beta, const Vector& offsets, double lambda,
                      const Vector& eta) {
    const double inv_n = 1.0 / static_cast<double>(data.n());
    Vector resid(data.n());
    for (Index i = 0; i < data.n(); ++i) resid[i] = data.y[i] - sigmoid(eta[i]);
    const Vector score = (data.X.transpose() * resid) * inv_n;
    double worst = data.intercept ? std::abs(resid.mean()) : 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double c = score[j] - offsets[j];
        const double v = beta[j] != 0.0 ? std::abs(c - std::copysign(lambda, beta[j]))
                                        : std::max(0.0, std::abs(c) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

Vector linear_predictor(const BinaryDataset& data, const Vector& beta, double b0) {
    Vector eta = data.X * beta;
    eta.array() += b0;
    return eta;
}

struct WeightedLassoResult {
    int sweeps = 0;
};

// Coordinate descent on (2n)^-1 sum w_i (z_i - eta_i)^2 + g'beta + lambda ||beta||_1,
// with `r` holding the working residual z - eta on entry and exit.
WeightedLassoResult weighted_lasso(const BinaryDataset& data, const Vector& w, const Vector& offsets, double lambda,
                                   Vector& beta, double& b0, Vector& r, const SolverConfig& cfg, int max_sweeps) {
    const double inv_n = 1.0 / static_cast<double>(data.n());
    const Index p = data.p();
    Vector v(p);
    for (Index j = 0; j < p; ++j) v[j] = data.X.col(j).cwiseAbs2().dot(w) * inv_n;
    const double w_sum = w.sum();
    Vector wr = w.cwiseProduct(r);

    auto update_intercept = [&]() {
        if (!data.intercept) return 0.0;
        const double delta = wr.sum() / w_sum;
        if (delta != 0.0) {
            b0 += delta;
            r.array() -= delta;
            wr.noalias() -= delta * w;
        }
        return std::abs(delta);
    };
    auto update = [&](Index j) {
        const auto xj = data.X.col(j);
        const double old = beta[j];
        const double z = v[j] * old + xj.dot(wr) * inv_n - offsets[j];
        // Same rounding guard as the least-squares solver.
        const double updated =
            std::abs(z) - lambda <= 1e-13 * (v[j] * std::abs(old) + lambda) ? 0.0 : soft_threshold(z, lambda) / v[j];
        const double delta = updated - old;
        if (delta != 0.0) {
            r.noalias() -= delta * xj;
            wr.noalias() -= delta * xj.cwiseProduct(w);
            beta[j] = updated;
        }
        return std::abs(delta);
    };

    WeightedLassoResult res;
    std::vector<Index> active;
    while (res.sweeps < max_sweeps) {
        double change = update_intercept();
        for (Index j = 0; j < p; ++j) change = std::max(change, update(j));
        ++res.sweeps;
        if (change <= cfg.tol) break;
        active.clear();
        for (Index j = 0; j < p; ++j)
            if (beta[j] != 0.0) active.push_back(j);
        for (int c = 0; c < cfg.active_set_cycles && res.sweeps < max_sweeps; ++c) {
            double ch = update_intercept();
            for (Index j : active) ch = std::max(ch, update(j));
            ++res.sweeps;
            if (ch <= cfg.tol) break;
        }
    }
    return res;
}

LogisticFit finish(const BinaryDataset& data, LogisticFit fit) {
    const Vector eta = linear_predictor(data, fit.beta, fit.intercept_value);
    fit.deviance = 2.0 * static_cast<double>(data.n()) * mean_loss(eta, data.y);
    fit.support = support_of(fit.beta);
    return fit;
}

}  // namespace

OriginalCoefficients BinaryDataset::to_original(const Vector& beta, double intercept_value) const {
    require(beta.size() == p(), ErrorKind::DimensionMismatch, "coefficient length differs from p");
    OriginalCoefficients out;
    out.coef = beta.cwiseQuotient(col_scale);
    out.intercept = intercept_value - col_center.dot(out.coef);
    return out;
}

BinaryDataset make_binary_dataset(const Matrix& raw_X, const Vector& raw_y, bool intercept) {
    require(raw_y.size() == raw_X.rows(), ErrorKind::DimensionMismatch, "response and design row counts differ");
    require(raw_X.rows() >= 2 && raw_X.cols() >= 1, ErrorKind::DimensionMismatch, "need n >= 2 and p >= 1");
    bool has0 = false;
    bool has1 = false;
    for (Index i = 0; i < raw_y.size(); ++i) {
        require(raw_y[i] == 0.0 || raw_y[i] == 1.0, ErrorKind::InvalidArgument, "binary response must be 0 or 1");
        (raw_y[i] == 1.0 ? has1 : has0) = true;
    }
    require(has0 && has1, ErrorKind::InvalidArgument, "binary response needs both classes");

    // Standardize the design exactly as for least squares; the response stays 0/1.
    const Dataset d = standardize(raw_X, Vector::Zero(raw_X.rows()), intercept);
    BinaryDataset out;
    out.y = raw_y;
    out.X = d.X;
    out.col_scale = d.col_scale;
    out.col_center = d.col_center;
    out.intercept = intercept;
    return out;
}

double neg_loglik(const Vector& beta, double intercept, const BinaryDataset& data) {
    require(beta.size() == data.p(), ErrorKind::DimensionMismatch, "coefficient length differs from p");
    return mean_loss(linear_predictor(data, beta, intercept), data.y);
}

double logistic_penalized_objective(const BinaryDataset& data, const PenaltySpec& spec, const Vector& beta,
                                    double intercept, double lambda) {
    double pen = 0.0;
    for (Index j = 0; j < beta.size(); ++j) pen += spec.value(std::abs(beta[j]), lambda);
    return neg_loglik(beta, intercept, data) + pen;
}

double logistic_lambda_max(const BinaryDataset& data) {
    const double p0 = data.intercept ? data.y.mean() : 0.5;
    const Vector resid = data.y.array() - p0;
    return (data.X.transpose() * resid).cwiseAbs().maxCoeff() / static_cast<double>(data.n());
}

LogisticFit logistic_solve_surrogate(const BinaryDataset& data, const Vector& offsets, double lambda,
                                     const Vector& warm_beta, double warm_intercept, const SolverConfig& cfg) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(offsets.size() == data.p() && warm_beta.size() == data.p(), ErrorKind::DimensionMismatch,
            "offset or warm start length differs from p");
    require(offsets.cwiseAbs().maxCoeff() <= lambda * (1.0 + 1e-12), ErrorKind::InvalidArgument,
            "linear offsets must satisfy |g_j| <= lambda");
    cfg.validate();

    const Index n = data.n();
    LogisticFit fit;
    fit.lambda = lambda;
    fit.beta = warm_beta;
    fit.intercept_value = data.intercept ? warm_intercept : 0.0;
    fit.converged = false;

    Vector eta = linear_predictor(data, fit.beta, fit.intercept_value);
    double f_cur = surrogate_objective(eta, data.y, offsets, fit.beta, lambda);
    Vector w(n);
    Vector r(n);
    // max_iter bounds the coordinate sweeps of the whole solve, not each IRLS
    // round: near separation the rounds themselves stop contracting.
    while (fit.iterations_inner < cfg.max_iter) {
        double max_w = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double pr = sigmoid(eta[i]);
            w[i] = std::max(pr * (1.0 - pr), 1e-5 * kSeparationWeight);
            max_w = std::max(max_w, pr * (1.0 - pr));
            r[i] = (data.y[i] - pr) / w[i];
        }
        if (max_w < kSeparationWeight)
            throw Error(ErrorKind::Separation, "IRLS weights collapsed (max p(1-p) = " + std::to_string(max_w) + ")");

        Vector beta_new = fit.beta;
        double b0_new = fit.intercept_value;
        fit.iterations_inner +=
            weighted_lasso(data, w, offsets, lambda, beta_new, b0_new, r, cfg, cfg.max_iter - fit.iterations_inner).sweeps;
        ++fit.iterations_outer;

        const Vector step = beta_new - fit.beta;
        const double step_b0 = b0_new - fit.intercept_value;
        double t = 1.0;
        Vector trial_beta = beta_new;
        double trial_b0 = b0_new;
        Vector trial_eta = linear_predictor(data, trial_beta, trial_b0);
        double f_new = surrogate_objective(trial_eta, data.y, offsets, trial_beta, lambda);
        int halvings = 0;
        while (f_new > f_cur && halvings < kMaxHalvings) {
            t *= 0.5;
            ++halvings;
            trial_beta = fit.beta + t * step;
            trial_b0 = fit.intercept_value + t * step_b0;
            trial_eta = linear_predictor(data, trial_beta, trial_b0);
            f_new = surrogate_objective(trial_eta, data.y, offsets, trial_beta, lambda);
        }
        if (f_new > f_cur) {
            // No descent along the IRLS direction: the current point is optimal
            // up to rounding.
            fit.kkt_residual = score_residual(data, fit.beta, offsets, lambda, eta);
            fit.converged = fit.kkt_residual <= 10.0 * cfg.tol;
            break;
        }
        const double move = std::max(t * step.cwiseAbs().maxCoeff(), t * std::abs(step_b0));
        const double decrease = f_cur - f_new;
        fit.beta = std::move(trial_beta);
        fit.intercept_value = trial_b0;
        eta = std::move(trial_eta);
        f_cur = f_new;
        if (decrease <= cfg.tol && move <= cfg.tol) {
            fit.kkt_residual = score_residual(data, fit.beta, offsets, lambda, eta);
            if (fit.kkt_residual <= 10.0 * cfg.tol) {
                fit.converged = true;
                break;
            }
        }
    }
    if (!fit.converged && fit.kkt_residual == 0.0)
        fit.kkt_residual = score_residual(data, fit.beta, offsets, lambda, eta);
    return finish(data, std::move(fit));
}

LogisticFit logistic_lasso(const BinaryDataset& data, double lambda, const SolverConfig& cfg,
                           const LogisticFit* warm) {
    const Vector zero = Vector::Zero(data.p());
    return logistic_solve_surrogate(data, zero, lambda, warm ? warm->beta : zero, warm ? warm->intercept_value : 0.0,
                                    cfg);
}

LogisticFit logistic_calibrated_cccp(const BinaryDataset& data, const PenaltySpec& spec, double lambda, double tau,
                                     const SolverConfig& cfg, const LogisticFit* step1_warm) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(tau > 0.0 && tau <= 1.0, ErrorKind::InvalidArgument, "tau must lie in (0, 1]");

    const Vector zero = Vector::Zero(data.p());
    LogisticFit step1 =
        logistic_solve_surrogate(data, zero, tau * lambda, step1_warm ? step1_warm->beta : zero,
                                 step1_warm ? step1_warm->intercept_value : 0.0, cfg);
    Vector g(data.p());
    for (Index j = 0; j < data.p(); ++j) g[j] = spec.concave_grad(step1.beta[j], lambda);
    LogisticFit step2 = logistic_solve_surrogate(data, g, lambda, step1.beta, step1.intercept_value, cfg);

    step2.iterations_outer += step1.iterations_outer;
    step2.iterations_inner += step1.iterations_inner;
    step2.converged = step1.converged && step2.converged;
    step2.tau = tau;
    step2.step1_intercept = step1.intercept_value;
    step2.step1_beta = std::move(step1.beta);
    step2.kkt_residual = logistic_kkt_violation(step2, data, spec, lambda);
    return step2;
}

LogisticFit logistic_oracle_fit(const BinaryDataset& data, std::span<const Index> support, const SolverConfig& cfg) {
    const Index n = data.n();
    const Index q = static_cast<Index>(support.size());
    const Index k = q + (data.intercept ? 1 : 0);
    require(k < n, ErrorKind::SupportTooLarge, "support too large for an unpenalized fit");

    Matrix Z(n, k);
    for (Index c = 0; c < q; ++c) {
        const Index j = support[static_cast<std::size_t>(c)];
        require(j >= 0 && j < data.p(), ErrorKind::InvalidArgument, "support index out of range");
        Z.col(c) = data.X.col(j);
    }
    if (data.intercept) Z.col(q).setOnes();

    Vector theta = Vector::Zero(k);
    Vector eta = Vector::Zero(n);
    double f_cur = mean_loss(eta, data.y);
    LogisticFit fit;
    fit.converged = false;
    for (int it = 0; it < std::min(cfg.max_iter, 200); ++it) {
        Vector w(n);
        Vector resid(n);
        double max_w = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double pr = sigmoid(eta[i]);
            w[i] = pr * (1.0 - pr);
            max_w = std::max(max_w, w[i]);
            resid[i] = data.y[i] - pr;
        }
        if (max_w < kSeparationWeight) throw Error(ErrorKind::Separation, "oracle logistic fit separates the data");
        const Vector grad = Z.transpose() * resid;
        const Matrix H = Z.transpose() * w.asDiagonal() * Z;
        Eigen::LDLT<Matrix> ldlt(H);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw Error(ErrorKind::RankDeficient, "oracle logistic Hessian is singular");
        const Vector step = ldlt.solve(grad);
        double t = 1.0;
        Vector trial = theta + step;
        Vector trial_eta = Z * trial;
        double f_new = mean_loss(trial_eta, data.y);
        for (int h = 0; h < kMaxHalvings && f_new > f_cur; ++h) {
            t *= 0.5;
            trial = theta + t * step;
            trial_eta = Z * trial;
            f_new = mean_loss(trial_eta, data.y);
        }
        ++fit.iterations_outer;
        const double move = t * step.cwiseAbs().maxCoeff();
        if (f_new <= f_cur) {
            theta = trial;
            eta = trial_eta;
            f_cur = f_new;
        }
        if (move <= cfg.tol || f_new > f_cur) {
            fit.converged = true;
            break;
        }
    }
    fit.beta = Vector::Zero(data.p());
    for (Index c = 0; c < q; ++c) fit.beta[support[static_cast<std::size_t>(c)]] = theta[c];
    fit.intercept_value = data.intercept ? theta[q] : 0.0;
    return finish(data, std::move(fit));
}

double logistic_kkt_violation(const LogisticFit& fit, const BinaryDataset& data, const PenaltySpec& spec,
                              double lambda) {
    const Vector eta = linear_predictor(data, fit.beta, fit.intercept_value);
    Vector resid(data.n());
    for (Index i = 0; i < data.n(); ++i) resid[i] = data.y[i] - sigmoid(eta[i]);
    const Vector score = (data.X.transpose() * resid) / static_cast<double>(data.n());
    double worst = data.intercept ? std::abs(resid.mean()) : 0.0;
    for (Index j = 0; j < data.p(); ++j) {
        const double b = fit.beta[j];
        const double v = b != 0.0 ? std::abs(score[j] - std::copysign(spec.deriv(std::abs(b), lambda), b))
                                  : std::max(0.0, std::abs(score[j]) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

int predict_class(const LogisticFit& fit, const Vector& x) {
    require(x.size() == fit.beta.size(), ErrorKind::DimensionMismatch, "feature vector length differs from p");
    return x.dot(fit.beta) + fit.intercept_value > 0.0 ? 1 : 0;
}

int predict_class(const OriginalCoefficients& model, const Vector& x) {
    require(x.size() == model.coef.size(), ErrorKind::DimensionMismatch, "feature vector length differs from p");
    return x.dot(model.coef) + model.intercept > 0.0 ? 1 : 0;
}

double misclassification_rate(const OriginalCoefficients& model, const Matrix& X, const Vector& y) {
    require(X.rows() == y.size() && X.rows() > 0, ErrorKind::DimensionMismatch, "test set shape mismatch");
    require(X.cols() == model.coef.size(), ErrorKind::DimensionMismatch, "test design width differs from p");
    Vector eta = X * model.coef;
    eta.array() += model.intercept;
    Index wrong = 0;
    for (Index i = 0; i < y.size(); ++i) wrong += ((eta[i] > 0.0 ? 1.0 : 0.0) != y[i]) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(y.size());
}

double hbic_logistic(double deviance, std::size_t model_size, Index n, Index p, double c_n) {
    require(n >= 2, ErrorKind::InvalidArgument, "HBIC needs n >= 2");
    require(p >= 1, ErrorKind::InvalidArgument, "HBIC needs p >= 1");
    const auto nd = static_cast<double>(n);
    return deviance / nd + static_cast<double>(model_size) * c_n * std::log(static_cast<double>(p)) / nd;
}

LogisticPath logistic_path(const BinaryDataset& data, const PenaltySpec& spec, std::span<const double> grid,
                           TauRule tau_rule, const SolverConfig& cfg, std::optional<std::size_t> max_support) {
    require(!grid.empty(), ErrorKind::InvalidArgument, "lambda grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        require(grid[k] < grid[k - 1], ErrorKind::InvalidArgument, "lambda grid must be strictly decreasing");
    LogisticPath out;
    std::optional<LogisticFit> warm;
    for (const double lambda : grid) {
        LogisticFit fit;
        try {
            fit = logistic_calibrated_cccp(data, spec, lambda, tau_rule.resolve(data.n(), lambda), cfg,
                                           warm ? &*warm : nullptr);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Separation) throw;
            out.separated = true;
            break;
        }
        if (!fit.converged) {
            out.saturated = true;
            break;
        }
        LogisticFit step1;
        step1.beta = *fit.step1_beta;
        step1.intercept_value = fit.step1_intercept;
        warm = std::move(step1);
        const std::size_t s = fit.support.size();
        out.lambdas.push_back(lambda);
        out.fits.push_back(std::move(fit));
        if (max_support && s > *max_support) break;
    }
    return out;
}

LogisticSelection select_hbic_logistic(const LogisticPath& path, Index n, Index p, const HbicConfig& cfg) {
    require(!path.fits.empty(), ErrorKind::EmptyList, "logistic path is empty");
    const double c_n = cfg.resolve_c_n(n);
    const std::size_t k_n = cfg.resolve_k_n(n);
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t k = 0; k < path.fits.size(); ++k) {
        const LogisticFit& f = path.fits[k];
        if (f.support.size() > k_n) continue;
        const double s = hbic_logistic(f.deviance, f.support.size(), n, p, c_n);
        if (!best || s < best_score || (s == best_score && path.lambdas[k] > path.lambdas[*best])) {
            best = k;
            best_score = s;
        }
    }
    if (!best) throw Error(ErrorKind::AllExcluded, "every logistic path point exceeds K_n");
    return LogisticSelection{*best, path.lambdas[*best], best_score, path.fits[*best]};
}

}  // namespace ccpath
