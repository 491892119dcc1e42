#pragma once

#include <span>

#include "ccpath/model.hpp"
#include "ccpath/selection.hpp"
#include "ccpath/solver.hpp"

namespace ccpath {

struct HlassoConfig {
    /// Threshold multiplier: coordinates with |beta_j| <= c*lambda are dropped.
    double c = 2.0;
};

/// Hard-thresholded Lasso: Lasso at lambda, drop |beta_j| <= c*lambda, refit
/// least squares on the survivors.
FitResult hlasso_fit(const Dataset& data, double lambda, const HlassoConfig& cfg, const SolverConfig& solver_cfg = {},
                     const Vector* lasso_warm = nullptr);

struct HlassoPath {
    SolutionPath path;
    /// Lasso solutions behind each refit, aligned with `path`.
    std::vector<Vector> lasso_betas;
};

/// Thresholded-and-refitted fits along `grid`. Points whose refit is not
/// possible (rank deficient) are skipped; the path stops at the first point
/// with more than n-1 survivors.
HlassoPath hlasso_path(const Dataset& data, std::span<const double> grid, const HlassoConfig& cfg,
                       const SolverConfig& solver_cfg = {});

Selection hlasso_path_select(const Dataset& data, std::span<const double> grid, const HlassoConfig& cfg,
                             const HbicConfig& hbic_cfg, const SolverConfig& solver_cfg = {});

/// Fitters for cross-validated baselines.
CvFitter lasso_cv_fitter(const SolverConfig& cfg);
CvFitter cccp_cv_fitter(const PenaltySpec& spec, const SolverConfig& cfg, int max_outer = 50);

}  // namespace ccpath
