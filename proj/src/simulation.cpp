#include "ccpath/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "ccpath/error.hpp"

namespace ccpath {

std::string_view to_string(DesignKind kind) noexcept {
    switch (kind) {
        case DesignKind::Ar1: return "ar1";
        case DesignKind::CompoundSymmetry: return "cs";
        case DesignKind::Blocks: return "blocks";
    }
    return "unknown";
}

std::string_view to_string(ResponseKind kind) noexcept {
    return kind == ResponseKind::Linear ? "linear" : "logistic";
}

DesignKind parse_design_kind(std::string_view text) {
    if (text == "ar1") return DesignKind::Ar1;
    if (text == "cs") return DesignKind::CompoundSymmetry;
    if (text == "blocks") return DesignKind::Blocks;
    throw Error(ErrorKind::InvalidDesign, "unknown design kind '" + std::string(text) + "'");
}

ResponseKind parse_response_kind(std::string_view text) {
    if (text == "linear") return ResponseKind::Linear;
    if (text == "logistic") return ResponseKind::Logistic;
    throw Error(ErrorKind::InvalidDesign, "unknown response kind '" + std::string(text) + "'");
}

void SimDesign::validate() const {
    require(n >= 2 && p >= 1, ErrorKind::InvalidDesign, "design needs n >= 2 and p >= 1");
    require(rho >= 0.0 && rho < 1.0, ErrorKind::InvalidDesign, "correlation must lie in [0, 1)");
    require(test_size >= 0, ErrorKind::InvalidDesign, "test size must be nonnegative");
    if (response == ResponseKind::Linear) require(sigma >= 0.0, ErrorKind::InvalidDesign, "sigma must be >= 0");
    if (kind == DesignKind::Blocks) {
        require(p % kBlockSize == 0 && p / kBlockSize >= kSignalBlocks, ErrorKind::InvalidDesign,
                "block design needs p divisible by 20 with at least 10 blocks");
        require(static_cast<Index>(beta_head.size()) <= kBlockSize, ErrorKind::InvalidDesign,
                "block pattern longer than a block");
        require(block_divisor > 0.0, ErrorKind::InvalidDesign, "block divisor must be positive");
    } else {
        require(static_cast<Index>(beta_head.size()) <= p, ErrorKind::InvalidDesign, "beta* longer than p");
    }
}

SimDesign scenario(std::string_view name) {
    SimDesign d;
    d.name = std::string(name);
    if (name == "case1a") return d;
    if (name == "case1b") {
        d.rho = 0.8;
        return d;
    }
    if (name == "case1c") {
        d.kind = DesignKind::CompoundSymmetry;
        return d;
    }
    if (name == "case2a" || name == "case2b") {
        d.kind = DesignKind::Blocks;
        d.sigma = 1.0;
        d.n = name == "case2a" ? 200 : 300;
        d.p = name == "case2a" ? 3000 : 4000;
        return d;
    }
    if (name == "logit") {
        d.response = ResponseKind::Logistic;
        d.n = 300;
        d.p = 2000;
        d.sigma = 0.0;
        d.test_size = 1000;
        return d;
    }
    throw Error(ErrorKind::InvalidDesign, "unknown scenario '" + std::string(name) + "'");
}

std::vector<std::string> scenario_names() { return {"case1a", "case1b", "case1c", "case2a", "case2b", "logit"}; }

namespace {

void fill_rows(Matrix& X, const SimDesign& d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index p = X.cols();
    if (d.kind == DesignKind::CompoundSymmetry) {
        const double shared = std::sqrt(d.rho);
        const double own = std::sqrt(1.0 - d.rho);
        for (Index i = 0; i < X.rows(); ++i) {
            const double z0 = normal(rng);
            for (Index j = 0; j < p; ++j) X(i, j) = shared * z0 + own * normal(rng);
        }
        return;
    }
    // Stationary AR(1) recursion along the columns: cov(x_j, x_k) = rho^|j-k|.
    const double innov = std::sqrt(1.0 - d.rho * d.rho);
    for (Index i = 0; i < X.rows(); ++i) {
        double prev = normal(rng);
        X(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = d.rho * prev + innov * normal(rng);
            X(i, j) = prev;
        }
    }
}

void fill_response(Vector& y, const Matrix& X, const Vector& beta, const SimDesign& d, std::mt19937_64& rng) {
    const Vector eta = X * beta;
    y.resize(X.rows());
    if (d.response == ResponseKind::Linear) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index i = 0; i < y.size(); ++i) y[i] = eta[i] + d.sigma * normal(rng);
        return;
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index i = 0; i < y.size(); ++i) {
        const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
        y[i] = unif(rng) < prob ? 1.0 : 0.0;
    }
}

}  // namespace

GeneratedData gen_design(const SimDesign& design, std::uint64_t rep) {
    design.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(design.seed), static_cast<std::uint32_t>(design.seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    std::mt19937_64 rng(seq);

    Vector beta = Vector::Zero(design.p);
    if (design.kind == DesignKind::Blocks) {
        const Index blocks = design.p / kBlockSize;
        std::vector<Index> ids(static_cast<std::size_t>(blocks));
        for (Index b = 0; b < blocks; ++b) ids[static_cast<std::size_t>(b)] = b;
        for (Index k = 0; k < kSignalBlocks; ++k) {
            const auto remaining = static_cast<std::uint64_t>(blocks - k);
            const auto pick = static_cast<std::size_t>(k) + static_cast<std::size_t>(rng() % remaining);
            std::swap(ids[static_cast<std::size_t>(k)], ids[pick]);
        }
        for (Index k = 0; k < kSignalBlocks; ++k) {
            const Index start = ids[static_cast<std::size_t>(k)] * kBlockSize;
            for (std::size_t t = 0; t < design.beta_head.size(); ++t)
                beta[start + static_cast<Index>(t)] = design.beta_head[t] / design.block_divisor;
        }
    } else {
        for (std::size_t t = 0; t < design.beta_head.size(); ++t) beta[static_cast<Index>(t)] = design.beta_head[t];
    }

    GeneratedData out;
    out.truth = TrueModel::from_beta(beta);
    if (design.kind == DesignKind::Blocks) {
        const auto per_block = static_cast<std::size_t>(
            std::count_if(design.beta_head.begin(), design.beta_head.end(), [](double v) { return v != 0.0; }));
        require(out.truth.q == per_block * kSignalBlocks, ErrorKind::InvalidDesign,
                "block design produced an unexpected number of nonzeros");
    }
    out.X.resize(design.n, design.p);
    fill_rows(out.X, design, rng);
    fill_response(out.y, out.X, beta, design, rng);
    if (design.test_size > 0) {
        out.X_test.resize(design.test_size, design.p);
        fill_rows(out.X_test, design, rng);
        fill_response(out.y_test, out.X_test, beta, design, rng);
    }
    return out;
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::New: return "new";
        case Method::LassoCv: return "lasso";
        case Method::ScadCv: return "scad";
        case Method::HLasso: return "hlasso";
        case Method::Oracle: return "oracle";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    for (Method m : {Method::New, Method::LassoCv, Method::ScadCv, Method::HLasso, Method::Oracle})
        if (text == to_string(m)) return m;
    throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

std::vector<Method> parse_methods(std::string_view comma_list) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= comma_list.size()) {
        const std::size_t end = std::min(comma_list.find(',', start), comma_list.size());
        const std::string_view item = comma_list.substr(start, end - start);
        if (!item.empty()) {
            const Method m = parse_method(item);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
        start = end + 1;
    }
    require(!out.empty(), ErrorKind::InvalidArgument, "no methods given");
    return out;
}

namespace {

std::optional<std::size_t> path_cap(const MethodConfig& cfg, Index n) {
    if (!cfg.path_stop_factor) return std::nullopt;
    return static_cast<std::size_t>(std::ceil(*cfg.path_stop_factor * static_cast<double>(cfg.hbic.resolve_k_n(n))));
}

CvConfig rep_cv(const MethodConfig& cfg, const SimDesign& design, std::uint64_t rep) {
    CvConfig cv = cfg.cv;
    cv.seed = cfg.cv.seed ^ (design.seed * 0x9E3779B97F4A7C15ULL) ^ (rep + 1);
    return cv;
}

void run_linear(Method method, const GeneratedData& g, const SimDesign& design, const MethodConfig& cfg,
                std::uint64_t rep, RepRecord& rec) {
    const Dataset data = standardize(g.X, g.y, cfg.center);
    FitResult fit;
    if (method == Method::Oracle) {
        fit = oracle_fit(data, g.truth.support);
    } else {
        const std::vector<double> grid = lambda_grid(data, cfg.grid_points, cfg.grid_ratio);
        switch (method) {
            case Method::New: {
                SolutionPath sp = path(data, cfg.penalty, grid, cfg.tau, cfg.solver, path_cap(cfg, data.n()));
                fit = select_hbic(sp, cfg.hbic).fit;
                break;
            }
            case Method::LassoCv:
                fit = cv_select(data, lasso_cv_fitter(cfg.solver), grid, rep_cv(cfg, design, rep)).fit;
                break;
            case Method::ScadCv:
                fit = cv_select(data, cccp_cv_fitter(cfg.penalty, cfg.solver), grid, rep_cv(cfg, design, rep)).fit;
                break;
            case Method::HLasso:
                fit = hlasso_path_select(data, grid, cfg.hlasso, cfg.hbic, cfg.solver).fit;
                break;
            case Method::Oracle: break;
        }
    }
    rec.estimate = data.to_original(fit.beta).coef;
    rec.lambda = fit.lambda;
    rec.nonconverged = !fit.converged;
}

void run_logistic(Method method, const GeneratedData& g, const MethodConfig& cfg, RepRecord& rec) {
    const BinaryDataset data = make_binary_dataset(g.X, g.y, cfg.center);
    LogisticFit fit;
    switch (method) {
        case Method::Oracle:
            fit = logistic_oracle_fit(data, g.truth.support, cfg.solver);
            break;
        case Method::New: {
            const std::vector<double> grid = log_grid(logistic_lambda_max(data), cfg.grid_points, cfg.grid_ratio);
            const LogisticPath lp = logistic_path(data, cfg.penalty, grid, cfg.tau, cfg.solver, path_cap(cfg, data.n()));
            fit = select_hbic_logistic(lp, data.n(), data.p(), cfg.hbic).fit;
            break;
        }
        default:
            throw Error(ErrorKind::InvalidArgument,
                        "method '" + std::string(to_string(method)) + "' is not available for binary responses");
    }
    const OriginalCoefficients model = data.to_original(fit.beta, fit.intercept_value);
    rec.estimate = model.coef;
    rec.lambda = fit.lambda;
    rec.nonconverged = !fit.converged;
    if (g.X_test.rows() > 0) rec.misclassification = misclassification_rate(model, g.X_test, g.y_test);
}

}  // namespace

RepRecord run_method(Method method, const GeneratedData& data, const SimDesign& design, const MethodConfig& cfg,
                     std::uint64_t rep) {
    RepRecord rec;
    rec.rep = rep;
    rec.method = method;
    rec.beta_star = data.truth.beta_star;
    const auto start = std::chrono::steady_clock::now();
    try {
        if (design.response == ResponseKind::Linear)
            run_linear(method, data, design, cfg, rep, rec);
        else
            run_logistic(method, data, cfg, rec);
    } catch (const Error& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.estimate = Vector();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

const MethodSummary* SimReport::find(Method m) const {
    for (const auto& row : rows)
        if (row.method == m) return &row;
    return nullptr;
}

SimReport aggregate_report(std::vector<RepRecord> records, const SimDesign& design, const MethodConfig& cfg,
                           std::span<const Method> methods) {
    std::sort(records.begin(), records.end(), [](const RepRecord& a, const RepRecord& b) {
        return a.method != b.method ? a.method < b.method : a.rep < b.rep;
    });
    SimReport report;
    report.design = design;
    report.config = cfg;
    for (const Method m : methods) {
        MethodSummary row;
        row.method = m;
        double misclass_sum = 0.0;
        std::size_t misclass_count = 0;
        std::size_t ok = 0;
        for (const RepRecord& r : records) {
            if (r.method != m) continue;
            ++row.reps;
            row.seconds += r.seconds;
            if (r.failed) {
                ++row.failures;
                continue;
            }
            if (r.nonconverged) ++row.nonconverged;
            const Vector one[] = {r.estimate};
            const Metrics single = selection_metrics(one, TrueModel::from_beta(r.beta_star));
            row.metrics.tp += single.tp;
            row.metrics.fp += single.fp;
            row.metrics.tm += single.tm;
            row.metrics.mse += single.mse;
            ++ok;
            if (r.misclassification) {
                misclass_sum += *r.misclassification;
                ++misclass_count;
            }
        }
        if (ok > 0) {
            const auto c = static_cast<double>(ok);
            row.metrics.tp /= c;
            row.metrics.fp /= c;
            row.metrics.tm /= c;
            row.metrics.mse /= c;
        }
        row.metrics.count = ok;
        if (misclass_count > 0) row.misclassification = misclass_sum / static_cast<double>(misclass_count);
        report.reps = std::max(report.reps, row.reps);
        report.rows.push_back(row);
    }
    return report;
}

SimReport run_monte_carlo(const SimDesign& design, std::span<const Method> methods, std::size_t reps,
                          const MethodConfig& cfg, unsigned threads) {
    require(reps >= 1, ErrorKind::InvalidArgument, "need at least one replication");
    require(!methods.empty(), ErrorKind::InvalidArgument, "no methods requested");
    design.validate();
    if (design.response == ResponseKind::Logistic)
        for (Method m : methods)
            require(m == Method::New || m == Method::Oracle, ErrorKind::InvalidArgument,
                    "binary responses support the new and oracle methods only");

    const auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<RepRecord>> per_rep(reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t rep = next++; rep < reps; rep = next++) {
            const GeneratedData g = gen_design(design, rep);
            for (Method m : methods) per_rep[rep].push_back(run_method(m, g, design, cfg, rep));
        }
    };
    unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    count = static_cast<unsigned>(std::min<std::size_t>(count, reps));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }

    std::vector<RepRecord> records;
    for (auto& v : per_rep)
        for (auto& r : v) records.push_back(std::move(r));
    SimReport report = aggregate_report(std::move(records), design, cfg, methods);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::json design_to_json(const SimDesign& d) {
    return {{"name", d.name},
            {"kind", to_string(d.kind)},
            {"rho", d.rho},
            {"n", d.n},
            {"p", d.p},
            {"beta_head", d.beta_head},
            {"block_divisor", d.block_divisor},
            {"sigma", d.sigma},
            {"response", to_string(d.response)},
            {"seed", d.seed},
            {"test_size", d.test_size}};
}

namespace {

nlohmann::json config_to_json(const MethodConfig& c, Index n) {
    nlohmann::json tau;
    switch (c.tau.kind) {
        case TauRule::Kind::InvLogN: tau = "invlogn"; break;
        case TauRule::Kind::EqualsLambda: tau = "lambda"; break;
        case TauRule::Kind::Fixed: tau = c.tau.value; break;
    }
    nlohmann::json j = {{"penalty", to_string(c.penalty.family())},
                        {"a", c.penalty.a()},
                        {"tau", tau},
                        {"tol", c.solver.tol},
                        {"max_iter", c.solver.max_iter},
                        {"active_set_cycles", c.solver.active_set_cycles},
                        {"c_n", c.hbic.resolve_c_n(n)},
                        {"k_n", c.hbic.resolve_k_n(n)},
                        {"cv_folds", c.cv.folds},
                        {"cv_seed", c.cv.seed},
                        {"hlasso_c", c.hlasso.c},
                        {"grid_points", c.grid_points},
                        {"grid_ratio", c.grid_ratio},
                        {"center", c.center}};
    j["path_stop_factor"] = c.path_stop_factor ? nlohmann::json(*c.path_stop_factor) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

nlohmann::json report_to_json(const SimReport& report, bool include_timing) {
    nlohmann::json rows = nlohmann::json::array();
    for (const MethodSummary& r : report.rows) {
        nlohmann::json row = {{"method", to_string(r.method)},
                              {"tp", r.metrics.tp},
                              {"fp", r.metrics.fp},
                              {"tm", r.metrics.tm},
                              {"mse", r.metrics.mse},
                              {"reps", r.reps},
                              {"scored", r.metrics.count},
                              {"failures", r.failures},
                              {"nonconverged", r.nonconverged}};
        if (r.misclassification) row["misclassification"] = *r.misclassification;
        if (include_timing) row["seconds"] = r.seconds;
        rows.push_back(std::move(row));
    }
    nlohmann::json j = {{"design", design_to_json(report.design)},
                        {"config", config_to_json(report.config, report.design.n)},
                        {"reps", report.reps},
                        {"methods", std::move(rows)}};
    if (include_timing) j["wall_seconds"] = report.wall_seconds;
    return j;
}

std::string format_table(const SimReport& report) {
    const bool classify = report.design.response == ResponseKind::Logistic;
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%s: n=%ld p=%ld reps=%zu\n", report.design.name.c_str(),
                  static_cast<long>(report.design.n), static_cast<long>(report.design.p), report.reps);
    out << line;
    std::snprintf(line, sizeof line, "%-8s %8s %8s %6s %8s%s %6s %8s\n", "Method", "TP", "FP", "TM", "MSE",
                  classify ? "  Misclass" : "", "Fail", "Sec");
    out << line;
    for (const MethodSummary& r : report.rows) {
        std::string extra;
        if (classify) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %9.3f", r.misclassification.value_or(std::nan("")));
            extra = buf;
        }
        std::snprintf(line, sizeof line, "%-8s %8.2f %8.2f %6.2f %8.3f%s %6zu %8.1f\n",
                      std::string(to_string(r.method)).c_str(), r.metrics.tp, r.metrics.fp, r.metrics.tm,
                      r.metrics.mse, extra.c_str(), r.failures, r.seconds);
        out << line;
    }
    return out.str();
}

}  // namespace ccpath
