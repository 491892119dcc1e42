#include "ccpath/baselines.hpp"

#include <cmath>
#include <string>

#include "ccpath/error.hpp"

namespace ccpath {

FitResult hlasso_fit(const Dataset& data, double lambda, const HlassoConfig& cfg, const SolverConfig& solver_cfg,
                     const Vector* lasso_warm) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    require(cfg.c > 0.0, ErrorKind::InvalidArgument, "threshold multiplier c must be positive");

    const FitResult initial =
        lasso_warm ? lasso(data, lambda, *lasso_warm, solver_cfg) : lasso(data, lambda, solver_cfg);
    const double eta = cfg.c * lambda;
    Support survivors;
    for (Index j : initial.support)
        if (std::abs(initial.beta[j]) > eta) survivors.push_back(j);
    require(static_cast<Index>(survivors.size()) <= data.n() - 1, ErrorKind::TooManySurvivors,
            std::to_string(survivors.size()) + " coefficients survive thresholding, more than n-1");

    FitResult fit = oracle_fit(data, survivors);
    fit.lambda = lambda;
    fit.iterations = initial.iterations;
    fit.converged = initial.converged;
    fit.max_coord_change = initial.max_coord_change;
    fit.step1_beta = initial.beta;
    return fit;
}

HlassoPath hlasso_path(const Dataset& data, std::span<const double> grid, const HlassoConfig& cfg,
                       const SolverConfig& solver_cfg) {
    require(!grid.empty(), ErrorKind::InvalidArgument, "lambda grid is empty");
    HlassoPath out;
    out.path.n = data.n();
    out.path.p = data.p();
    out.path.y_norm2 = data.y.squaredNorm();
    Vector warm = Vector::Zero(data.p());
    for (const double lambda : grid) {
        FitResult fit;
        try {
            fit = hlasso_fit(data, lambda, cfg, solver_cfg, &warm);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::TooManySurvivors) break;
            if (e.kind() == ErrorKind::RankDeficient) continue;
            throw;
        }
        warm = *fit.step1_beta;
        out.lasso_betas.push_back(warm);
        out.path.lambdas.push_back(lambda);
        out.path.sigma2.push_back(fit.sse / static_cast<double>(data.n()));
        out.path.hbic.emplace_back();
        out.path.fits.push_back(std::move(fit));
    }
    require(out.path.size() > 0, ErrorKind::AllExcluded, "no grid point admits a least-squares refit");
    return out;
}

Selection hlasso_path_select(const Dataset& data, std::span<const double> grid, const HlassoConfig& cfg,
                             const HbicConfig& hbic_cfg, const SolverConfig& solver_cfg) {
    HlassoPath hp = hlasso_path(data, grid, cfg, solver_cfg);
    return select_hbic(hp.path, hbic_cfg);
}

CvFitter lasso_cv_fitter(const SolverConfig& cfg) {
    return [cfg](const Dataset& train, double lambda, const FitResult* previous) {
        return previous ? lasso(train, lambda, previous->beta, cfg) : lasso(train, lambda, cfg);
    };
}

CvFitter cccp_cv_fitter(const PenaltySpec& spec, const SolverConfig& cfg, int max_outer) {
    return [spec, cfg, max_outer](const Dataset& train, double lambda, const FitResult* previous) {
        CccpOptions opts;
        opts.max_outer = max_outer;
        // The first CCCP step from zero is a Lasso; warm-starting its inner
        // solver from the previous grid point's Lasso leaves the iterates unchanged.
        if (previous && previous->step1_beta) opts.first_step_warm = *previous->step1_beta;
        return cccp_full(train, spec, lambda, cfg, opts);
    };
}

}  // namespace ccpath
