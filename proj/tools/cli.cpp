#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ccpath/diagnostics.hpp"
#include "io.hpp"

namespace ccpath::cli {

namespace {

using nlohmann::json;

struct ModelOptions {
    std::string penalty = "scad";
    double a = 0.0;
    std::string tau = "invlogn";
    int grid_points = 100;
    double grid_ratio = 0.01;
    std::size_t k_n = 0;
    double c_n = 0.0;
    double tol = 1e-7;
    int max_iter = 10000;

    PenaltySpec spec() const {
        require(a >= 0.0, ErrorKind::InvalidArgument, "--a must be positive");
        return PenaltySpec::make(parse_penalty_family(penalty), a);
    }
    TauRule tau_rule() const { return TauRule::parse(tau); }
    SolverConfig solver() const {
        SolverConfig c;
        c.tol = tol;
        c.max_iter = max_iter;
        c.validate();
        return c;
    }
    HbicConfig hbic() const {
        require(c_n >= 0.0, ErrorKind::InvalidArgument, "--cn must be positive");
        HbicConfig h;
        if (k_n > 0) h.k_n = k_n;
        if (c_n > 0.0) h.c_n = c_n;
        return h;
    }
    void validate() const {
        (void)spec();
        (void)tau_rule();
        (void)solver();
        (void)hbic();
        require(grid_points >= 1, ErrorKind::InvalidArgument, "--grid-points must be at least 1");
        require(grid_ratio > 0.0 && grid_ratio < 1.0, ErrorKind::InvalidArgument, "--grid-ratio must lie in (0, 1)");
    }
    json to_json() const {
        const PenaltySpec s = spec();
        return {{"penalty", to_string(s.family())}, {"a", s.a()}, {"tau", tau}};
    }
};

struct DataOptions {
    std::string positional;
    std::string flag;
    std::string response;
    bool no_center = false;
    std::string model = "linear";

    const std::string& path() const {
        require(!positional.empty() || !flag.empty(), ErrorKind::InvalidArgument, "no data file given");
        return positional.empty() ? flag : positional;
    }
    bool logistic() const { return model == "logistic"; }
};

struct FitOptions {
    DataOptions data;
    ModelOptions model;
    std::string select = "hbic";
    int folds = 5;
    std::uint64_t seed = 1;
    double lambda = 0.0;
    std::string test;
    std::string out;
    std::string coef_out;
    std::size_t max_support = 0;
};

struct PathOptions {
    DataOptions data;
    ModelOptions model;
    std::string out;
    std::string coef_out;
    std::size_t max_support = 0;
};

struct SimOptions {
    std::string scenario;
    std::string design_file;
    ModelOptions model;
    std::size_t reps = 100;
    std::string methods = "new,oracle";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double path_stop = 2.0;
    int folds = 5;
    double hlasso_c = 2.0;
    Index n = 0;
    Index p = 0;
    double sigma = -1.0;
    double rho = -1.0;
    Index test_size = -1;
    std::string out;
    bool timing = false;
};

struct DiagOptions {
    DataOptions data;
    std::string fit;
    std::string coef;
    double lambda = 0.0;
    std::string penalty;
    double a = 0.0;
    bool kkt = false;
    bool xi = false;
    bool l2 = false;
    std::string support;
    Index m = 0;
    double u_n = 1.0;
    double kkt_tol = 1e-6;
    std::string out;
};

void add_data_options(CLI::App* app, DataOptions& d) {
    app->add_option("file", d.positional, "CSV file with a header row");
    app->add_option("--data", d.flag, "same as the positional file argument");
    app->add_option("--response", d.response, "response column (default: the first column)");
    app->add_flag("--no-center", d.no_center, "fit without an intercept");
    app->add_option("--model", d.model, "linear or logistic")
        ->check(CLI::IsMember({"linear", "logistic"}))
        ->capture_default_str();
}

void add_model_options(CLI::App* app, ModelOptions& m) {
    app->add_option("--penalty", m.penalty, "scad, mcp or l1")->capture_default_str();
    app->add_option("--a", m.a, "penalty shape (default 3.7 for SCAD, 3 for MCP)");
    app->add_option("--tau", m.tau, "step-1 ratio: invlogn, lambda or a number in (0,1]")->capture_default_str();
    app->add_option("--grid-points", m.grid_points)->capture_default_str();
    app->add_option("--grid-ratio", m.grid_ratio, "smallest lambda as a fraction of lambda_max")->capture_default_str();
    app->add_option("--kn", m.k_n, "largest model size scored by HBIC (default ceil(n/log n))");
    app->add_option("--cn", m.c_n, "HBIC constant (default log log n)");
    app->add_option("--tol", m.tol, "coordinate descent tolerance")->capture_default_str();
    app->add_option("--max-iter", m.max_iter, "sweep budget per solve")->capture_default_str();
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json coefficient_json(const std::vector<std::string>& names, const OriginalCoefficients& c) {
    json nz = json::object();
    for (std::size_t j = 0; j < names.size(); ++j)
        if (c.coef[static_cast<Index>(j)] != 0.0) nz[names[j]] = c.coef[static_cast<Index>(j)];
    return {{"intercept", c.intercept}, {"nonzero", nz}};
}

json support_names(const std::vector<std::string>& names, const Support& s) {
    json a = json::array();
    for (Index j : s) a.push_back(names[static_cast<std::size_t>(j)]);
    return a;
}

void print_support(std::ostream& out, const std::vector<std::string>& names, const OriginalCoefficients& c,
                   const Support& s) {
    out << "support    " << s.size() << (s.empty() ? "" : ":");
    for (Index j : s) out << ' ' << names[static_cast<std::size_t>(j)];
    out << "\n\n" << std::left << std::setw(16) << kInterceptName << ' ' << fmt(c.intercept, 8) << '\n';
    for (Index j : s) out << std::setw(16) << names[static_cast<std::size_t>(j)] << ' ' << fmt(c.coef[j], 8) << '\n';
    out << std::right;
}

std::optional<double> safe_hbic(double sse, std::size_t size, Index n, Index p, const HbicConfig& h, double y2) {
    if (size > h.resolve_k_n(n)) return std::nullopt;
    try {
        return hbic_score(sse, size, n, p, h.resolve_c_n(n), y2);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateSSE) return std::nullopt;
        throw;
    }
}

std::optional<double> logistic_score(const LogisticFit& f, Index n, Index p, const HbicConfig& h) {
    if (f.support.size() > h.resolve_k_n(n)) return std::nullopt;
    return hbic_logistic(f.deviance, f.support.size(), n, p, h.resolve_c_n(n));
}

std::optional<std::size_t> cap(std::size_t v) { return v > 0 ? std::optional<std::size_t>(v) : std::nullopt; }

json linear_path_table(const SolutionPath& sp) {
    json rows = json::array();
    for (std::size_t k = 0; k < sp.size(); ++k)
        rows.push_back({{"lambda", sp.lambdas[k]},
                        {"tau", nullable(sp.fits[k].tau)},
                        {"size", sp.fits[k].support.size()},
                        {"sigma2", sp.sigma2[k]},
                        {"hbic", k < sp.hbic.size() ? nullable(sp.hbic[k]) : json(nullptr)},
                        {"converged", sp.fits[k].converged}});
    return rows;
}

json logistic_path_table(const LogisticPath& lp, Index n, Index p, const HbicConfig& h) {
    json rows = json::array();
    for (std::size_t k = 0; k < lp.fits.size(); ++k) {
        const LogisticFit& f = lp.fits[k];
        rows.push_back({{"lambda", lp.lambdas[k]},
                        {"tau", nullable(f.tau)},
                        {"size", f.support.size()},
                        {"deviance", f.deviance},
                        {"hbic", nullable(logistic_score(f, n, p, h))},
                        {"converged", f.converged}});
    }
    return rows;
}

void print_path_table(std::ostream& out, const json& rows, const char* fit_column) {
    out << std::setw(5) << "k" << std::setw(14) << "lambda" << std::setw(7) << "size" << std::setw(14) << fit_column
        << std::setw(14) << "hbic" << '\n';
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const json& r = rows[k];
        out << std::setw(5) << k << std::setw(14) << fmt(r["lambda"].get<double>()) << std::setw(7)
            << r["size"].get<std::size_t>() << std::setw(14) << fmt(r[fit_column].get<double>()) << std::setw(14)
            << (r["hbic"].is_null() ? std::string("-") : fmt(r["hbic"].get<double>())) << '\n';
    }
}

double test_mse(const OriginalCoefficients& c, const Matrix& X, const Vector& y) {
    const Vector r = y - X * c.coef - Vector::Constant(y.size(), c.intercept);
    return r.squaredNorm() / static_cast<double>(y.size());
}

void warn_nonconverged(std::ostream& err, bool converged) {
    if (!converged) err << "warning: the selected fit hit the iteration budget before converging\n";
}

json data_header(const DataTable& t, const DataOptions& d) {
    return {{"data", d.path()},
            {"response", t.response},
            {"n", t.X.rows()},
            {"p", t.X.cols()},
            {"model", d.model},
            {"center", !d.no_center}};
}

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
    o.model.validate();
    require(o.select == "hbic" || o.select == "cv", ErrorKind::InvalidArgument, "--select must be hbic or cv");
    const DataTable t = read_data(o.data.path(), o.data.response);
    const PenaltySpec spec = o.model.spec();
    const TauRule tau = o.model.tau_rule();
    const SolverConfig cfg = o.model.solver();
    const HbicConfig h = o.model.hbic();
    const bool fixed = o.lambda > 0.0;
    const Index n = t.X.rows();
    const Index p = t.X.cols();

    json report = data_header(t, o.data);
    report["command"] = "fit";
    report["config"] = o.model.to_json();
    report["selection"] = fixed ? "fixed" : o.select;

    OriginalCoefficients coef;
    Support support;
    double lambda = 0.0;
    std::optional<double> score;
    bool converged = true;

    std::optional<DataTable> test;
    Matrix X_test;
    if (!o.test.empty()) {
        test = read_data(o.test, t.response);
        X_test = align_columns(*test, t.predictors);
    }

    if (o.data.logistic()) {
        require(o.select == "hbic" || fixed, ErrorKind::InvalidArgument,
                "cross-validation is only available for linear models");
        const BinaryDataset bd = make_binary_dataset(t.X, t.y, !o.data.no_center);
        LogisticFit f;
        if (fixed) {
            f = logistic_calibrated_cccp(bd, spec, o.lambda, tau.resolve(n, o.lambda), cfg);
        } else {
            const auto grid = log_grid(logistic_lambda_max(bd), o.model.grid_points, o.model.grid_ratio);
            const LogisticPath lp = logistic_path(bd, spec, grid, tau, cfg, cap(o.max_support));
            report["path"] = logistic_path_table(lp, n, p, h);
            f = select_hbic_logistic(lp, n, p, h).fit;
        }
        coef = bd.to_original(f.beta, f.intercept_value);
        support = f.support;
        lambda = f.lambda;
        score = logistic_score(f, n, p, h);
        converged = f.converged;
        report["deviance"] = f.deviance;
        if (test) report["test_misclassification"] = misclassification_rate(coef, X_test, test->y);
    } else {
        const Dataset d = standardize(t.X, t.y, !o.data.no_center);
        FitResult f;
        if (fixed) {
            f = calibrated_cccp(d, spec, o.lambda, tau.resolve(n, o.lambda), cfg);
        } else if (o.select == "hbic") {
            const auto grid = lambda_grid(d, o.model.grid_points, o.model.grid_ratio);
            SolutionPath sp = path(d, spec, grid, tau, cfg, cap(o.max_support));
            f = select_hbic(sp, h).fit;
            report["path"] = linear_path_table(sp);
        } else {
            const auto grid = lambda_grid(d, o.model.grid_points, o.model.grid_ratio);
            const CvFitter fitter = [spec, tau, cfg](const Dataset& train, double lam, const FitResult* prev) {
                const Vector* warm = prev && prev->step1_beta ? &*prev->step1_beta : nullptr;
                return calibrated_cccp(train, spec, lam, tau.resolve(train.n(), lam), cfg, warm);
            };
            const CvSelection cv = cv_select(d, fitter, grid, CvConfig{o.folds, o.seed});
            f = cv.fit;
            json cv_rows = json::array();
            for (std::size_t k = 0; k < grid.size(); ++k)
                cv_rows.push_back({{"lambda", grid[k]}, {"cv_error", cv.cv_error[k]}});
            report["cv"] = cv_rows;
        }
        coef = d.to_original(f.beta);
        support = f.support;
        lambda = f.lambda;
        converged = f.converged;
        score = safe_hbic(f.sse, f.support.size(), n, p, h, d.y.squaredNorm());
        report["sigma2"] = f.sse / static_cast<double>(n);
        if (test) report["test_mse"] = test_mse(coef, X_test, test->y);
    }

    report["lambda"] = lambda;
    report["hbic"] = nullable(score);
    report["converged"] = converged;
    report["support"] = support_names(t.predictors, support);
    report["coefficients"] = coefficient_json(t.predictors, coef);
    warn_nonconverged(err, converged);

    out << "model      " << o.data.model << " (n=" << n << ", p=" << p << ", response " << t.response << ")\n"
        << "penalty    " << to_string(spec.family()) << " a=" << spec.a() << ", tau " << o.model.tau << '\n'
        << "selection  " << report["selection"].get<std::string>() << '\n'
        << "lambda     " << fmt(lambda) << '\n';
    if (report.contains("sigma2")) out << "sigma2     " << fmt(report["sigma2"].get<double>()) << '\n';
    if (report.contains("deviance")) out << "deviance   " << fmt(report["deviance"].get<double>()) << '\n';
    out << "hbic       " << (score ? fmt(*score) : std::string("-")) << '\n';
    if (report.contains("test_mse")) out << "test mse   " << fmt(report["test_mse"].get<double>()) << '\n';
    if (report.contains("test_misclassification"))
        out << "test error " << fmt(report["test_misclassification"].get<double>()) << '\n';
    print_support(out, t.predictors, coef, support);

    if (!o.coef_out.empty()) write_coefficients(o.coef_out, t.predictors, coef);
    if (!o.out.empty()) write_text(o.out, report.dump(2) + "\n");
    return kExitOk;
}

void write_path_csv(const std::string& file, const std::vector<std::string>& names, const std::vector<double>& lambdas,
                    const std::vector<OriginalCoefficients>& coefs) {
    std::ostringstream s;
    s << "lambda," << kInterceptName;
    for (const auto& name : names) s << ',' << name;
    s << '\n';
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        s << format_number(lambdas[k]) << ',' << format_number(coefs[k].intercept);
        for (Index j = 0; j < coefs[k].coef.size(); ++j) s << ',' << format_number(coefs[k].coef[j]);
        s << '\n';
    }
    write_text(file, s.str());
}

int cmd_path(const PathOptions& o, std::ostream& out, std::ostream& err) {
    o.model.validate();
    const DataTable t = read_data(o.data.path(), o.data.response);
    const PenaltySpec spec = o.model.spec();
    const TauRule tau = o.model.tau_rule();
    const SolverConfig cfg = o.model.solver();
    const HbicConfig h = o.model.hbic();
    const Index n = t.X.rows();
    const Index p = t.X.cols();

    json report = data_header(t, o.data);
    report["command"] = "path";
    report["config"] = o.model.to_json();

    std::vector<double> lambdas;
    std::vector<OriginalCoefficients> coefs;
    json rows;
    bool all_converged = true;
    if (o.data.logistic()) {
        const BinaryDataset bd = make_binary_dataset(t.X, t.y, !o.data.no_center);
        const auto grid = log_grid(logistic_lambda_max(bd), o.model.grid_points, o.model.grid_ratio);
        const LogisticPath lp = logistic_path(bd, spec, grid, tau, cfg, cap(o.max_support));
        rows = logistic_path_table(lp, n, p, h);
        lambdas = lp.lambdas;
        for (std::size_t k = 0; k < lp.fits.size(); ++k) {
            coefs.push_back(bd.to_original(lp.fits[k].beta, lp.fits[k].intercept_value));
            rows[k]["support"] = support_names(t.predictors, lp.fits[k].support);
            all_converged = all_converged && lp.fits[k].converged;
        }
        report["separated"] = lp.separated;
        report["saturated"] = lp.saturated;
    } else {
        const Dataset d = standardize(t.X, t.y, !o.data.no_center);
        const auto grid = lambda_grid(d, o.model.grid_points, o.model.grid_ratio);
        SolutionPath sp = path(d, spec, grid, tau, cfg, cap(o.max_support));
        for (std::size_t k = 0; k < sp.size(); ++k)
            sp.hbic[k] = safe_hbic(sp.fits[k].sse, sp.fits[k].support.size(), n, p, h, sp.y_norm2);
        rows = linear_path_table(sp);
        lambdas = sp.lambdas;
        for (std::size_t k = 0; k < sp.size(); ++k) {
            coefs.push_back(d.to_original(sp.fits[k].beta));
            rows[k]["support"] = support_names(t.predictors, sp.fits[k].support);
            all_converged = all_converged && sp.fits[k].converged;
        }
    }
    report["points"] = rows;
    if (!all_converged) err << "warning: some path points hit the iteration budget before converging\n";

    print_path_table(out, rows, o.data.logistic() ? "deviance" : "sigma2");
    if (!o.coef_out.empty()) write_path_csv(o.coef_out, t.predictors, lambdas, coefs);
    if (!o.out.empty()) write_text(o.out, report.dump(2) + "\n");
    return kExitOk;
}

int cmd_simulate(const SimOptions& o, std::ostream& out, std::ostream&) {
    o.model.validate();
    require(!o.scenario.empty() || !o.design_file.empty(), ErrorKind::InvalidArgument,
            "give a scenario name or --design");
    require(o.reps >= 1, ErrorKind::InvalidArgument, "--reps must be at least 1");
    require(o.path_stop >= 0.0, ErrorKind::InvalidArgument, "--path-stop must be nonnegative");
    require(o.folds >= 2, ErrorKind::InvalidArgument, "--folds must be at least 2");

    SimDesign design = o.scenario.empty() ? SimDesign{} : scenario(o.scenario);
    if (!o.design_file.empty()) design = read_design_file(o.design_file, design);
    design.seed = o.seed;
    if (o.n > 0) design.n = o.n;
    if (o.p > 0) design.p = o.p;
    if (o.sigma >= 0.0) design.sigma = o.sigma;
    if (o.rho >= 0.0) design.rho = o.rho;
    if (o.test_size >= 0) design.test_size = o.test_size;
    design.validate();

    MethodConfig mc;
    mc.penalty = o.model.spec();
    mc.tau = o.model.tau_rule();
    mc.solver = o.model.solver();
    mc.hbic = o.model.hbic();
    mc.cv.folds = o.folds;
    mc.hlasso.c = o.hlasso_c;
    require(o.hlasso_c > 0.0, ErrorKind::InvalidArgument, "--hlasso-c must be positive");
    mc.grid_points = o.model.grid_points;
    mc.grid_ratio = o.model.grid_ratio;
    if (o.path_stop > 0.0) mc.path_stop_factor = o.path_stop;

    const std::vector<Method> methods = parse_methods(o.methods);
    const SimReport report = run_monte_carlo(design, methods, o.reps, mc, o.threads);
    out << format_table(report);
    if (!o.out.empty()) write_text(o.out, report_to_json(report, o.timing).dump(2) + "\n");
    return kExitOk;
}

Support parse_support(const std::string& list, const std::vector<std::string>& names) {
    Support s;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto it = std::find(names.begin(), names.end(), item);
        if (it != names.end()) {
            s.push_back(static_cast<Index>(it - names.begin()));
            continue;
        }
        // Not a column name: accept a 0-based predictor index.
        const double v = parse_number(item, "--support");
        require(v >= 0 && v < static_cast<double>(names.size()) && v == std::floor(v), ErrorKind::InvalidArgument,
                "--support entry '" + item + "' is neither a column nor a predictor index");
        s.push_back(static_cast<Index>(v));
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    require(!s.empty(), ErrorKind::InvalidArgument, "--support is empty");
    return s;
}

int cmd_diagnose(DiagOptions o, std::ostream& out, std::ostream&) {
    require(o.fit.empty() != o.coef.empty(), ErrorKind::InvalidArgument, "give exactly one of --fit and --coef");
    require(o.kkt_tol > 0.0, ErrorKind::InvalidArgument, "--kkt-tol must be positive");
    if (!o.kkt && !o.xi && !o.l2) o.kkt = true;

    std::vector<std::string> names;
    OriginalCoefficients coef;
    bool center = !o.data.no_center;
    std::string penalty = o.penalty.empty() ? "scad" : o.penalty;
    double a = o.a;
    double lambda = o.lambda;
    if (!o.fit.empty()) {
        json fit;
        try {
            std::ifstream in(o.fit);
            require(in.good(), ErrorKind::Parse, "cannot open '" + o.fit + "'");
            fit = json::parse(in);
            require(fit.value("model", "linear") == "linear", ErrorKind::InvalidArgument,
                    "diagnose supports linear fits only");
            center = fit.at("center").get<bool>();
            if (o.penalty.empty()) penalty = fit.at("config").at("penalty").get<std::string>();
            if (a <= 0.0 && o.penalty.empty()) a = fit.at("config").at("a").get<double>();
            if (lambda <= 0.0) lambda = fit.at("lambda").get<double>();
            coef.intercept = fit.at("coefficients").at("intercept").get<double>();
            for (const auto& [name, value] : fit.at("coefficients").at("nonzero").items()) {
                names.push_back(name);
                coef.coef.conservativeResize(coef.coef.size() + 1);
                coef.coef[coef.coef.size() - 1] = value.get<double>();
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Parse, "'" + o.fit + "': " + e.what());
        }
    } else {
        std::tie(names, coef) = read_coefficients(o.coef);
    }
    require(lambda > 0.0, ErrorKind::InvalidArgument, "no lambda: pass --lambda or a --fit report");

    const DataTable t = read_data(o.data.path(), o.data.response);
    const Dataset d = standardize(t.X, t.y, center);
    Vector full = Vector::Zero(d.p());
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto it = std::find(t.predictors.begin(), t.predictors.end(), names[k]);
        require(it != t.predictors.end(), ErrorKind::InvalidArgument,
                "coefficient '" + names[k] + "' has no column in the data");
        full[it - t.predictors.begin()] = coef.coef[static_cast<Index>(k)];
    }
    const Vector beta = d.to_standardized(full);
    const PenaltySpec spec = PenaltySpec::make(parse_penalty_family(penalty), a);

    json report = {{"command", "diagnose"}, {"lambda", lambda}, {"penalty", to_string(spec.family())}, {"a", spec.a()}};
    out << "lambda " << fmt(lambda) << ", penalty " << to_string(spec.family()) << " a=" << spec.a() << '\n';
    if (o.kkt) {
        const KktReport k = kkt_violation(beta, d, spec, lambda, o.kkt_tol);
        report["kkt"] = {{"satisfied", k.satisfied},
                         {"max_violation_nonzero", k.max_violation_nonzero},
                         {"max_violation_zero", k.max_violation_zero},
                         {"worst", k.worst_index >= 0 ? json(t.predictors[static_cast<std::size_t>(k.worst_index)])
                                                      : json(nullptr)},
                         {"tolerance", k.tolerance}};
        out << "kkt        " << (k.satisfied ? "satisfied" : "violated") << " (nonzero "
            << fmt(k.max_violation_nonzero) << ", zero " << fmt(k.max_violation_zero) << ", tol "
            << fmt(k.tolerance) << ")\n";
    }
    if (o.xi || o.l2) {
        require(!o.support.empty(), ErrorKind::InvalidArgument, "--xi-min and --l2-bound need --support");
        require(d.p() <= kXiMinMaxP, ErrorKind::TooLargeForBruteForce,
                "p = " + std::to_string(d.p()) + " exceeds the exhaustive-search cap of " +
                    std::to_string(kXiMinMaxP));
    }
    if (o.xi) {
        const Support a0 = parse_support(o.support, t.predictors);
        const Index m = o.m > 0 ? o.m : std::min<Index>(2 * static_cast<Index>(a0.size()), d.p());
        const double xi = xi_min(d, a0, m);
        report["xi_min"] = {{"m", m}, {"value", xi}};
        out << "xi_min(" << m << ")  " << fmt(xi) << '\n';
    }
    if (o.l2) {
        TrueModel truth;
        truth.support = parse_support(o.support, t.predictors);
        truth.q = truth.support.size();
        truth.beta_star = Vector::Zero(d.p());
        const L2BoundCheck b = l2_bound_check(beta, d, truth, lambda, o.u_n);
        report["l2_bound"] = {{"lhs", b.lhs}, {"rhs", b.rhs}, {"xi_min", b.xi}, {"m", b.m}, {"holds", b.holds}};
        out << "l2 bound   " << (b.holds ? "holds" : "fails") << " (||b - oracle|| " << fmt(b.lhs) << " vs "
            << fmt(b.rhs) << ", xi_min(" << b.m << ") " << fmt(b.xi) << ")\n";
    }
    if (!o.out.empty()) write_text(o.out, report.dump(2) + "\n");
    return kExitOk;
}

/// Splices `key = value` lines from --config in front of the command-line
/// arguments, so that later (command-line) values win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
    if (args.empty()) return args;
    CLI::App* sub = nullptr;
    for (CLI::App* s : app.get_subcommands({}))
        if (s->get_name() == args[0]) sub = s;
    if (sub == nullptr) return args;

    std::string file;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
    }
    if (file.empty()) return args;

    std::vector<std::string> out{args[0]};
    for (const auto& [key, value] : read_key_values(file)) {
        require(key != "config" && sub->get_option_no_throw("--" + key) != nullptr, ErrorKind::Parse,
                "unknown config key '" + key + "' for " + args[0]);
        // One token per entry; CLI11 reads --flag=false as well as --opt=value.
        out.push_back("--" + key + "=" + value);
    }
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

}  // namespace

SimDesign read_design_file(const std::string& path, SimDesign d) {
    for (const auto& [key, value] : read_key_values(path)) {
        const std::string where = path + " '" + key + "'";
        if (key == "name") d.name = value;
        else if (key == "kind") d.kind = parse_design_kind(value);
        else if (key == "response") d.response = parse_response_kind(value);
        else if (key == "rho") d.rho = parse_number(value, where);
        else if (key == "sigma") d.sigma = parse_number(value, where);
        else if (key == "block_divisor") d.block_divisor = parse_number(value, where);
        else if (key == "n" || key == "p" || key == "test_size" || key == "seed") {
            const double v = parse_number(value, where);
            require(v >= 0 && v == std::floor(v), ErrorKind::Parse, where + ": expected a nonnegative integer");
            if (key == "n") d.n = static_cast<Index>(v);
            else if (key == "p") d.p = static_cast<Index>(v);
            else if (key == "test_size") d.test_size = static_cast<Index>(v);
            else d.seed = static_cast<std::uint64_t>(v);
        } else if (key == "beta_head") {
            d.beta_head.clear();
            std::istringstream in(value);
            std::string item;
            while (std::getline(in, item, ',')) {
                std::erase_if(item, [](unsigned char c) { return std::isspace(c) != 0; });
                d.beta_head.push_back(parse_number(item, where));
            }
        } else {
            throw Error(ErrorKind::Parse, "unknown design key '" + key + "' in " + path);
        }
    }
    return d;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Calibrated concave-convex penalized regression"};
    app.name("ccpath");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_file;

    FitOptions fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a path on CSV data and select lambda");
    add_data_options(fit_cmd, fit.data);
    add_model_options(fit_cmd, fit.model);
    fit_cmd->add_option("--select", fit.select, "hbic or cv")->capture_default_str();
    fit_cmd->add_option("--folds", fit.folds, "cross-validation folds")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "fold assignment seed")->capture_default_str();
    fit_cmd->add_option("--lambda", fit.lambda, "fit this lambda only (standardized scale)");
    fit_cmd->add_option("--test", fit.test, "held-out CSV with the same columns");
    fit_cmd->add_option("--max-support", fit.max_support, "stop the path past this support size");
    fit_cmd->add_option("--out", fit.out, "JSON report");
    fit_cmd->add_option("--coef-out", fit.coef_out, "coefficient CSV (original scale)");

    PathOptions pth;
    CLI::App* path_cmd = app.add_subcommand("path", "compute the calibrated solution path");
    add_data_options(path_cmd, pth.data);
    add_model_options(path_cmd, pth.model);
    path_cmd->add_option("--max-support", pth.max_support, "stop past this support size");
    path_cmd->add_option("--out", pth.out, "JSON report");
    path_cmd->add_option("--coef-out", pth.coef_out, "CSV with one row of coefficients per lambda");

    SimOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo comparison on a simulated design");
    sim_cmd->add_option("name", sim.scenario, "case1a, case1b, case1c, case2a, case2b or logit");
    sim_cmd->add_option("--scenario", sim.scenario, "same as the positional scenario");
    sim_cmd->add_option("--design", sim.design_file, "key = value design file");
    add_model_options(sim_cmd, sim.model);
    sim_cmd->add_option("--reps", sim.reps)->capture_default_str();
    sim_cmd->add_option("--methods", sim.methods, "comma list of new, lasso, scad, hlasso, oracle")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "0 uses every core")->capture_default_str();
    sim_cmd->add_option("--path-stop", sim.path_stop, "stop paths past this multiple of K_n (0 = never)")
        ->capture_default_str();
    sim_cmd->add_option("--folds", sim.folds)->capture_default_str();
    sim_cmd->add_option("--hlasso-c", sim.hlasso_c, "hard-threshold multiplier")->capture_default_str();
    sim_cmd->add_option("--n", sim.n);
    sim_cmd->add_option("--p", sim.p);
    sim_cmd->add_option("--sigma", sim.sigma);
    sim_cmd->add_option("--rho", sim.rho);
    sim_cmd->add_option("--test-size", sim.test_size);
    sim_cmd->add_option("--out", sim.out, "JSON report");
    sim_cmd->add_flag("--timing", sim.timing, "include wall-clock times in the JSON report");

    DiagOptions diag;
    CLI::App* diag_cmd = app.add_subcommand("diagnose", "check a fitted coefficient vector");
    add_data_options(diag_cmd, diag.data);
    diag_cmd->add_option("--fit", diag.fit, "JSON report written by fit --out");
    diag_cmd->add_option("--coef", diag.coef, "coefficient CSV written by fit --coef-out");
    diag_cmd->add_option("--lambda", diag.lambda, "lambda (taken from --fit when absent)");
    diag_cmd->add_option("--penalty", diag.penalty, "scad, mcp or l1");
    diag_cmd->add_option("--a", diag.a);
    diag_cmd->add_flag("--kkt", diag.kkt, "stationarity check (the default)");
    diag_cmd->add_flag("--xi-min", diag.xi, "sparse eigenvalue over supersets of --support");
    diag_cmd->add_flag("--l2-bound", diag.l2, "distance to the oracle against its bound");
    diag_cmd->add_option("--support", diag.support, "true support: column names or 0-based indices");
    diag_cmd->add_option("--m", diag.m, "superset size for --xi-min (default 2|support|)");
    diag_cmd->add_option("--un", diag.u_n, "sparsity multiplier for --l2-bound")->capture_default_str();
    diag_cmd->add_option("--kkt-tol", diag.kkt_tol)->capture_default_str();
    diag_cmd->add_option("--out", diag.out, "JSON report");

    for (CLI::App* s : {fit_cmd, path_cmd, sim_cmd, diag_cmd})
        s->add_option("--config", config_file, "key = value file; command-line flags override it");

    try {
        std::vector<std::string> expanded = expand_config(args, app);
        std::reverse(expanded.begin(), expanded.end());
        try {
            app.parse(expanded);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kExitOk : kExitInput;
        }
        if (fit_cmd->parsed()) return cmd_fit(fit, out, err);
        if (path_cmd->parsed()) return cmd_path(pth, out, err);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out, err);
        return cmd_diagnose(diag, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_input_error() ? kExitInput : kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace ccpath::cli
