#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ccpath/model.hpp"
#include "ccpath/solver.hpp"

namespace ccpath {

struct HbicConfig {
    /// Defaults to log(log(n)) when unset.
    std::optional<double> c_n;
    /// Largest admissible model size; defaults to ceil(n / log(n)) when unset.
    std::optional<std::size_t> k_n;

    double resolve_c_n(Index n) const;
    std::size_t resolve_k_n(Index n) const;
};

/// log(sse/n) + model_size * C_n * log(p) / n.
///
/// Throws DegenerateSSE when sse <= 1e-12 * y_norm2 (an interpolating fit whose
/// score would be -inf); pass y_norm2 = 0 to only reject sse <= 0.
double hbic_score(double sse, std::size_t model_size, Index n, Index p, double c_n, double y_norm2 = 0.0);

struct Selection {
    std::size_t index = 0;
    double lambda = 0.0;
    double score = 0.0;
    FitResult fit;
};

/// Minimizes HBIC over path points with |support| <= K_n; equal scores go to
/// the larger lambda. Fills `path.hbic` for every scored point.
Selection select_hbic(SolutionPath& path, const HbicConfig& cfg);
Selection select_hbic(const SolutionPath& path, const HbicConfig& cfg);

struct CvConfig {
    int folds = 5;
    std::uint64_t seed = 1;
};

/// Fits the training fold at `lambda`. `previous` is the same fold's fit at
/// the preceding (larger) grid value, or null for the first one.
using CvFitter = std::function<FitResult(const Dataset& train, double lambda, const FitResult* previous)>;

struct CvSelection {
    double lambda = 0.0;
    std::size_t index = 0;
    std::vector<double> cv_error;
    FitResult fit;
};

/// Row-to-fold assignment: a seeded shuffle of 0..n-1 dealt round-robin.
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// K-fold cross-validation on mean held-out squared prediction error, then a
/// refit on the full data at the chosen lambda. Each training fold is
/// re-standardized; predictions are made on the scale of `data`.
CvSelection cv_select(const Dataset& data, const CvFitter& fitter, std::span<const double> grid, const CvConfig& cfg);

}  // namespace ccpath
