#include "ccpath/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "ccpath/error.hpp"

namespace ccpath {

double HbicConfig::resolve_c_n(Index n) const {
    const double c = c_n ? *c_n : std::log(std::log(static_cast<double>(n)));
    require(c > 0.0, ErrorKind::InvalidArgument, "C_n must be positive");
    return c;
}

std::size_t HbicConfig::resolve_k_n(Index n) const {
    const std::size_t k =
        k_n ? *k_n : static_cast<std::size_t>(std::ceil(static_cast<double>(n) / std::log(static_cast<double>(n))));
    require(k >= 1, ErrorKind::InvalidArgument, "K_n must be at least 1");
    return k;
}

double hbic_score(double sse, std::size_t model_size, Index n, Index p, double c_n, double y_norm2) {
    require(n >= 2, ErrorKind::InvalidArgument, "HBIC needs n >= 2");
    require(p >= 2, ErrorKind::InvalidArgument, "HBIC needs p >= 2");
    require(c_n > 0.0, ErrorKind::InvalidArgument, "C_n must be positive");
    if (sse <= 0.0 || sse <= 1e-12 * y_norm2)
        throw Error(ErrorKind::DegenerateSSE, "fit interpolates the response (SSE = " + std::to_string(sse) + ")");
    const auto nd = static_cast<double>(n);
    return std::log(sse / nd) + static_cast<double>(model_size) * c_n * std::log(static_cast<double>(p)) / nd;
}

namespace {

std::vector<std::optional<double>> score_path(const SolutionPath& path, double c_n, std::size_t k_n) {
    std::vector<std::optional<double>> scores(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        const FitResult& fit = path.fits[k];
        if (fit.support.size() > k_n) continue;
        try {
            scores[k] = hbic_score(path.sigma2[k] * static_cast<double>(path.n), fit.support.size(), path.n, path.p,
                                   c_n, path.y_norm2);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateSSE) throw;
        }
    }
    return scores;
}

Selection pick(const SolutionPath& path, const std::vector<std::optional<double>>& scores) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (!scores[k]) continue;
        if (!best || *scores[k] < *scores[*best] ||
            (*scores[k] == *scores[*best] && path.lambdas[k] > path.lambdas[*best]))
            best = k;
    }
    if (!best) throw Error(ErrorKind::AllExcluded, "every path point exceeds K_n or interpolates the data");
    return Selection{*best, path.lambdas[*best], *scores[*best], path.fits[*best]};
}

}  // namespace

Selection select_hbic(const SolutionPath& path, const HbicConfig& cfg) {
    require(path.size() > 0, ErrorKind::EmptyList, "solution path is empty");
    return pick(path, score_path(path, cfg.resolve_c_n(path.n), cfg.resolve_k_n(path.n)));
}

Selection select_hbic(SolutionPath& path, const HbicConfig& cfg) {
    require(path.size() > 0, ErrorKind::EmptyList, "solution path is empty");
    auto scores = score_path(path, cfg.resolve_c_n(path.n), cfg.resolve_k_n(path.n));
    path.hbic = scores;
    return pick(path, scores);
}

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
    require(folds >= 2 && folds <= n, ErrorKind::InvalidArgument, "need 2 <= folds <= n");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit draw so the permutation does not depend on
    // the standard library's shuffle implementation.
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        fold[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    return fold;
}

CvSelection cv_select(const Dataset& data, const CvFitter& fitter, std::span<const double> grid, const CvConfig& cfg) {
    require(!grid.empty(), ErrorKind::InvalidArgument, "lambda grid is empty");
    const std::vector<int> fold = fold_assignment(data.n(), cfg.folds, cfg.seed);

    CvSelection out;
    out.cv_error.assign(grid.size(), 0.0);
    for (int f = 0; f < cfg.folds; ++f) {
        std::vector<Index> train_rows;
        std::vector<Index> test_rows;
        for (Index i = 0; i < data.n(); ++i) (fold[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);

        const Dataset train = standardize(data.X(train_rows, Eigen::all), data.y(train_rows), data.centered);
        const Matrix X_test = data.X(test_rows, Eigen::all);
        const Vector y_test = data.y(test_rows);

        std::optional<FitResult> previous;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            FitResult fit = fitter(train, grid[k], previous ? &*previous : nullptr);
            const OriginalCoefficients c = train.to_original(fit.beta);
            const Vector resid = (y_test - X_test * c.coef).array() - c.intercept;
            out.cv_error[k] += resid.squaredNorm();
            previous = std::move(fit);
        }
    }
    for (double& e : out.cv_error) e /= static_cast<double>(data.n());

    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (out.cv_error[k] < out.cv_error[best] ||
            (out.cv_error[k] == out.cv_error[best] && grid[k] > grid[best]))
            best = k;
    }
    out.index = best;
    out.lambda = grid[best];
    out.fit = fitter(data, out.lambda, nullptr);
    return out;
}

}  // namespace ccpath
