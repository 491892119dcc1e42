#include "ccpath/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace ccpath {

OriginalCoefficients Dataset::to_original(const Vector& beta) const {
    require(beta.size() == p(), ErrorKind::DimensionMismatch, "coefficient length differs from p");
    OriginalCoefficients out;
    out.coef = beta.cwiseQuotient(col_scale);
    out.intercept = y_center - col_center.dot(out.coef);
    return out;
}

Vector Dataset::to_standardized(const Vector& coef) const {
    require(coef.size() == p(), ErrorKind::DimensionMismatch, "coefficient length differs from p");
    return coef.cwiseProduct(col_scale);
}

Dataset standardize(const Matrix& raw_X, const Vector& raw_y, bool center) {
    const Index n = raw_X.rows();
    const Index p = raw_X.cols();
    require(raw_y.size() == n, ErrorKind::DimensionMismatch,
            "response has " + std::to_string(raw_y.size()) + " rows, design has " + std::to_string(n));
    require(n >= 2, ErrorKind::DimensionMismatch, "need at least two observations");
    require(p >= 1, ErrorKind::DimensionMismatch, "need at least one predictor");

    Dataset d;
    d.X = raw_X;
    d.y = raw_y;
    d.col_scale.resize(p);
    d.col_center = Vector::Zero(p);
    d.centered = center;

    for (Index j = 0; j < p; ++j) {
        auto col = d.X.col(j);
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi))))
            throw Error(ErrorKind::ConstantColumn, "column " + std::to_string(j) + " is constant");
        if (center) {
            d.col_center[j] = col.mean();
            col.array() -= d.col_center[j];
        }
        const double scale = std::sqrt(col.squaredNorm() / static_cast<double>(n));
        d.col_scale[j] = scale;
        if (scale != 1.0) col /= scale;
    }
    if (center) {
        d.y_center = d.y.mean();
        d.y.array() -= d.y_center;
    }
    d.standardized = true;
    return d;
}

TrueModel TrueModel::from_beta(const Vector& beta_star) {
    TrueModel t;
    t.beta_star = beta_star;
    t.support = support_of(beta_star);
    t.q = t.support.size();
    t.d_star = 0.0;
    if (t.q > 0) {
        t.d_star = std::abs(beta_star[t.support.front()]);
        for (Index j : t.support) t.d_star = std::min(t.d_star, std::abs(beta_star[j]));
    }
    return t;
}

Support support_of(const Vector& beta) {
    Support s;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) s.push_back(j);
    return s;
}

FitResult oracle_fit(const Dataset& data, std::span<const Index> support) {
    const Index n = data.n();
    const Index p = data.p();
    const auto q = static_cast<Index>(support.size());
    require(q <= n, ErrorKind::SupportTooLarge,
            "support of size " + std::to_string(q) + " exceeds n = " + std::to_string(n));

    FitResult fit;
    fit.beta = Vector::Zero(p);
    fit.support.assign(support.begin(), support.end());
    std::sort(fit.support.begin(), fit.support.end());
    require(std::adjacent_find(fit.support.begin(), fit.support.end()) == fit.support.end(),
            ErrorKind::InvalidArgument, "support contains duplicate indices");

    if (q > 0) {
        Matrix Xs(n, q);
        for (Index k = 0; k < q; ++k) {
            const Index j = fit.support[static_cast<std::size_t>(k)];
            require(j >= 0 && j < p, ErrorKind::InvalidArgument, "support index out of range");
            Xs.col(k) = data.X.col(j);
        }
        Eigen::JacobiSVD<Matrix> svd(Xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv[q - 1] < 1e-10 * sv[0])
            throw Error(ErrorKind::RankDeficient, "design restricted to the support is rank deficient");
        const Vector coef = svd.solve(data.y);
        for (Index k = 0; k < q; ++k) fit.beta[fit.support[static_cast<std::size_t>(k)]] = coef[k];
    }

    const Vector r = data.y - data.X * fit.beta;
    fit.sse = r.squaredNorm();
    double worst = 0.0;
    for (Index j : fit.support)
        worst = std::max(worst, std::abs(data.X.col(j).dot(r)) / static_cast<double>(n));
    fit.kkt_residual = worst;
    fit.support = support_of(fit.beta);
    return fit;
}

Metrics selection_metrics(std::span<const Vector> estimates, const TrueModel& truth) {
    require(!estimates.empty(), ErrorKind::EmptyList, "no estimates to score");
    const Index p = truth.beta_star.size();
    Metrics m;
    for (const Vector& est : estimates) {
        require(est.size() == p, ErrorKind::DimensionMismatch, "estimate length differs from p");
        std::size_t tp = 0;
        std::size_t fp = 0;
        for (Index j = 0; j < p; ++j) {
            const bool selected = est[j] != 0.0;
            const bool active = truth.beta_star[j] != 0.0;
            if (selected && active) ++tp;
            if (selected && !active) ++fp;
        }
        m.tp += static_cast<double>(tp);
        m.fp += static_cast<double>(fp);
        if (tp == truth.q && fp == 0) m.tm += 1.0;
        m.mse += (est - truth.beta_star).squaredNorm();
    }
    const auto count = static_cast<double>(estimates.size());
    m.tp /= count;
    m.fp /= count;
    m.tm /= count;
    m.mse /= count;
    m.count = estimates.size();
    return m;
}

}  // namespace ccpath
