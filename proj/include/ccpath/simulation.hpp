#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccpath/baselines.hpp"
#include "ccpath/logistic.hpp"
#include "ccpath/model.hpp"
#include "ccpath/penalty.hpp"
#include "ccpath/selection.hpp"
#include "ccpath/solver.hpp"

namespace ccpath {

enum class DesignKind { Ar1, CompoundSymmetry, Blocks };
enum class ResponseKind { Linear, Logistic };

std::string_view to_string(DesignKind kind) noexcept;
std::string_view to_string(ResponseKind kind) noexcept;
DesignKind parse_design_kind(std::string_view text);
ResponseKind parse_response_kind(std::string_view text);

/// Size of the coefficient blocks in the block-sparse design and how many of
/// them carry signal.
inline constexpr Index kBlockSize = 20;
inline constexpr Index kSignalBlocks = 10;

struct SimDesign {
    std::string name = "custom";
    DesignKind kind = DesignKind::Ar1;
    double rho = 0.5;
    Index n = 100;
    Index p = 3000;
    /// Leading coefficients of beta* (zero-padded to p). For Blocks
    /// this is the pattern assigned to each signal block.
    std::vector<double> beta_head = {3.0, 1.5, 0.0, 0.0, 2.0};
    /// Divisor applied to the block pattern (Blocks only).
    double block_divisor = 1.5;
    double sigma = 2.0;
    ResponseKind response = ResponseKind::Linear;
    std::uint64_t seed = 1;
    /// Independent test rows drawn after the training rows (classification error).
    Index test_size = 0;

    void validate() const;
};

/// Presets: case1a, case1b, case1c, case2a, case2b, logit.
SimDesign scenario(std::string_view name);
std::vector<std::string> scenario_names();

struct GeneratedData {
    Matrix X;
    Vector y;
    TrueModel truth;
    Matrix X_test;
    Vector y_test;
};

/// Draws replication `rep`. The random stream depends only on (seed, rep).
GeneratedData gen_design(const SimDesign& design, std::uint64_t rep);

enum class Method { New, LassoCv, ScadCv, HLasso, Oracle };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);
std::vector<Method> parse_methods(std::string_view comma_list);

struct MethodConfig {
    PenaltySpec penalty = PenaltySpec::scad();
    TauRule tau = TauRule::inv_log_n();
    SolverConfig solver;
    HbicConfig hbic;
    CvConfig cv;
    HlassoConfig hlasso;
    int grid_points = 100;
    double grid_ratio = 0.01;
    /// Center before fitting; off by default because simulated data is mean zero.
    bool center = false;
    /// Stop calibrated paths once the support exceeds this multiple of K_n.
    std::optional<double> path_stop_factor;
};

struct RepRecord {
    std::uint64_t rep = 0;
    Method method = Method::New;
    /// Estimate on the original scale of the generated design.
    Vector estimate;
    Vector beta_star;
    double lambda = 0.0;
    bool failed = false;
    bool nonconverged = false;
    std::string error;
    std::optional<double> misclassification;
    double seconds = 0.0;
};

struct MethodSummary {
    Method method = Method::New;
    Metrics metrics;
    std::optional<double> misclassification;
    std::size_t reps = 0;
    std::size_t failures = 0;
    std::size_t nonconverged = 0;
    double seconds = 0.0;
};

struct SimReport {
    SimDesign design;
    MethodConfig config;
    std::size_t reps = 0;
    std::vector<MethodSummary> rows;
    double wall_seconds = 0.0;

    const MethodSummary* find(Method m) const;
};

/// Runs one method on one replication; failures are captured in the record.
RepRecord run_method(Method method, const GeneratedData& data, const SimDesign& design, const MethodConfig& cfg,
                     std::uint64_t rep);

/// Means and proportions per method; records are ordered by (method, rep)
/// first so the result does not depend on input order. Failed records are
/// counted and excluded from the metrics.
SimReport aggregate_report(std::vector<RepRecord> records, const SimDesign& design, const MethodConfig& cfg,
                           std::span<const Method> methods);

/// `threads == 0` uses the available hardware concurrency.
SimReport run_monte_carlo(const SimDesign& design, std::span<const Method> methods, std::size_t reps,
                          const MethodConfig& cfg = {}, unsigned threads = 0);

/// Machine-readable report. Wall-clock times are left out unless requested so
/// that identical runs serialize identically.
nlohmann::json report_to_json(const SimReport& report, bool include_timing = false);
/// Table with one row per method: TP, FP, TM, MSE and, for classification,
/// the misclassification rate.
std::string format_table(const SimReport& report);

nlohmann::json design_to_json(const SimDesign& design);

}  // namespace ccpath
