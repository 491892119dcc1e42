// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "ccpath/diagnostics.hpp"
#include "ccpath/simulation.hpp"
#include "cli.hpp"
#include "support/oracles.hpp"

using namespace ccpath;

namespace {

int failures = 0;

void verdict(const std::string& id, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << (pass ? "PASS " : "FAIL ") << id << "  " << detail << std::endl;
}

std::string num(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::string elapsed() const {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return "[" + num(s, 1) + " s]";
    }
};

MethodConfig mc_config() {
    MethodConfig cfg;
    cfg.path_stop_factor = 2.0;
    return cfg;
}

SimReport monte_carlo(const std::string& name, std::vector<Method> methods, std::size_t reps) {
    return run_monte_carlo(scenario(name), methods, reps, mc_config(), 0);
}

const Metrics& row(const SimReport& r, Method m) { return r.find(m)->metrics; }

void criterion_1() {
    const Clock c;
    const SimReport r = monte_carlo("case1a", {Method::New, Method::Oracle}, 100);
    const Metrics& m = row(r, Method::New);
    const double oracle = row(r, Method::Oracle).mse;
    const bool pass = m.tm >= 0.80 && m.fp <= 0.6 && m.tp >= 2.90 && m.mse <= 0.45 && oracle >= 0.10 && oracle <= 0.20;
    verdict("1  case1a New", pass,
            "TM " + num(m.tm, 2) + " (>= 0.80), FP " + num(m.fp, 2) + " (<= 0.6), TP " + num(m.tp, 2) +
                " (>= 2.90), MSE " + num(m.mse, 3) + " (<= 0.45); Oracle MSE " + num(oracle, 3) + " (in [0.10, 0.20]) " +
                c.elapsed());
}

void criterion_2() {
    const Clock c;
    const SimReport r = monte_carlo("case1c", {Method::New}, 100);
    const Metrics& m = row(r, Method::New);
    verdict("2  case1c New", m.tm >= 0.40 && m.mse <= 2.0,
            "TM " + num(m.tm, 2) + " (>= 0.40), MSE " + num(m.mse, 3) + " (<= 2.0) " + c.elapsed());
}

void criterion_3() {
    const Clock c;
    const SimReport r = monte_carlo("case2b", {Method::New}, 100);
    const Metrics& m = row(r, Method::New);
    verdict("3  case2b New", m.tm >= 0.90 && m.fp <= 0.3 && m.mse <= 0.25,
            "TM " + num(m.tm, 2) + " (>= 0.90), FP " + num(m.fp, 2) + " (<= 0.3), MSE " + num(m.mse, 3) +
                " (<= 0.25) " + c.elapsed());
}

void criterion_4() {
    const Clock c;
    const SimReport r = monte_carlo("case1a", {Method::LassoCv}, 100);
    const Metrics& m = row(r, Method::LassoCv);
    verdict("4  case1a Lasso-CV overfits", m.fp >= 10.0 && m.tm <= 0.05,
            "FP " + num(m.fp, 2) + " (>= 10), TM " + num(m.tm, 2) + " (<= 0.05) " + c.elapsed());
}

void criterion_5() {
    const Clock c;
    const SimReport r = monte_carlo("logit", {Method::New}, 50);
    const MethodSummary* s = r.find(Method::New);
    const double err = s->misclassification.value_or(1.0);
    verdict("5  logistic New", err <= 0.14 && s->metrics.tm >= 0.85,
            "misclassification " + num(err, 3) + " (<= 0.14), TM " + num(s->metrics.tm, 2) + " (>= 0.85) " +
                c.elapsed());
}

void criterion_6a() {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double lambda = std::exp(std::log(1e-3) + unit(rng) * std::log(1e6));
        const double t = lambda * 10.0 * unit(rng) * unit(rng) * 5.0;
        const PenaltySpec spec = k % 2 ? PenaltySpec::mcp(1.01 + 9.0 * unit(rng)) : PenaltySpec::scad(2.01 + 8.0 * unit(rng));
        const double p = spec.value(t, lambda);
        const double gap = std::abs(p - spec.concave_value(t, lambda) - lambda * t) / std::max(1.0, p);
        worst = std::max(worst, gap);
    }
    verdict("6a penalty decomposition", worst <= 1e-12, "max relative gap " + num(worst * 1e12, 3) + "e-12 (<= 1e-12)");
}

void criterion_6b() {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double rho = 1.6 * unit(rng) - 0.8;
        auto inst = testing::linear_instance(40, 2, 2, 1.0, rho, 6200 + static_cast<std::uint64_t>(trial), 0.3, 2.5);
        const Dataset& d = inst.data;
        const double lambda = 0.02 + 0.8 * unit(rng);
        Vector g(2);
        g << lambda * (2.0 * unit(rng) - 1.0), lambda * (2.0 * unit(rng) - 1.0);
        const FitResult fit = solve_surrogate({d, g, lambda}, Vector::Zero(2), SolverConfig{});
        const double n = 40.0;
        const testing::Quadratic2d f{d.X.col(0).squaredNorm() / n, d.X.col(0).dot(d.X.col(1)) / n,
                                     d.X.col(1).squaredNorm() / n, d.X.col(0).dot(d.y) / n, d.X.col(1).dot(d.y) / n,
                                     g[0], g[1], lambda};
        const Eigen::Vector2d ref = testing::grid_minimize_2d(f);
        worst = std::max(worst, (fit.beta - Vector(ref)).cwiseAbs().maxCoeff());
    }
    verdict("6b surrogate vs 2-D grid", worst <= 1e-3, "max deviation " + num(worst, 6) + " over 50 instances (<= 1e-3)");
}

void criterion_6c() {
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const SolverConfig cfg;
    const PenaltySpec spec = PenaltySpec::scad();
    int calibrated_ok = 0;
    int full_ok = 0;
    int full_converged = 0;
    double worst_calibrated = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Index p = 10 + static_cast<Index>(unit(rng) * 41);
        auto inst = testing::linear_instance(100, p, 3, 1.0, 0.5, 6300 + k);
        const double lambda = lambda_max(inst.data) * std::exp(std::log(0.05) + unit(rng) * std::log(10.0));
        const FitResult cal = calibrated_cccp(inst.data, spec, lambda, 1.0 / std::log(100.0), cfg);
        const KktReport rc = kkt_violation(cal.beta, inst.data, spec, lambda, 10.0 * cfg.tol);
        calibrated_ok += rc.satisfied ? 1 : 0;
        worst_calibrated = std::max(worst_calibrated, rc.max_violation());
        const FitResult full = cccp_full(inst.data, spec, lambda, cfg);
        full_converged += full.converged ? 1 : 0;
        full_ok += kkt_violation(full.beta, inst.data, spec, lambda, 10.0 * cfg.tol).satisfied ? 1 : 0;
    }
    verdict("6c KKT of every output", calibrated_ok == 100 && full_ok == 100,
            "calibrated_cccp " + std::to_string(calibrated_ok) + "/100 (worst violation " + num(worst_calibrated, 4) +
                "), cccp_full " + std::to_string(full_ok) + "/100 (" + std::to_string(full_converged) +
                " converged within 50 outer steps); tolerance 10*tol = 1e-6");
}

void criterion_6d() {
    std::mt19937_64 rng(64);
    std::normal_distribution<double> normal(0.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        auto inst = testing::linear_instance(60, 40, 4, 1.5, 0.6, 6400 + k);
        std::vector<double> trace;
        CccpOptions opts;
        opts.objective_trace = &trace;
        if (k % 2 == 0) {
            Vector init(40);
            for (Index j = 0; j < 40; ++j) init[j] = normal(rng);
            opts.init = init;
        }
        const PenaltySpec spec = k % 3 == 0 ? PenaltySpec::mcp() : PenaltySpec::scad();
        const double lambda = (0.05 + 0.5 * unit(rng)) * lambda_max(inst.data);
        (void)cccp_full(inst.data, spec, lambda, SolverConfig{}, opts);
        for (std::size_t t = 1; t < trace.size(); ++t) worst = std::max(worst, trace[t] - trace[t - 1]);
    }
    verdict("6d cccp_full monotone", worst <= 1e-10, "largest objective increase " + num(worst, 12) + " (<= 1e-10)");
}

void criterion_6e() {
    const Clock c;
    SimDesign design = scenario("case1a");
    design.p = 300;
    int hits = 0;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        const GeneratedData g = gen_design(design, rep);
        const Dataset d = standardize(g.X, g.y, false);
        const SolutionPath sp =
            path(d, PenaltySpec::scad(), lambda_grid(d), TauRule::inv_log_n(), SolverConfig{}, 2 * 22);
        hits += std::any_of(sp.fits.begin(), sp.fits.end(),
                            [&](const FitResult& f) { return f.support == g.truth.support; })
                    ? 1
                    : 0;
    }
    verdict("6e path consistency", hits >= 43,
            std::to_string(hits) + "/50 = " + num(hits / 50.0, 2) + " (>= 0.85) " + c.elapsed());
}

void criterion_6f() {
    const SolverConfig cfg;
    const PenaltySpec spec = PenaltySpec::scad();
    int eligible = 0;
    int holds = 0;
    for (std::uint64_t k = 0; k < 200; ++k) {
        auto inst = testing::linear_instance(100, 10, 2, 1.0, 0.3, 6600 + k);
        const double lambda = std::sqrt(3.0 * std::log(10.0) / 100.0);
        std::mt19937_64 rng(k);
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector init(10);
        for (Index j = 0; j < 10; ++j) init[j] = normal(rng);
        CccpOptions opts;
        opts.init = init;
        opts.max_outer = 1000;
        const FitResult fit = cccp_full(inst.data, spec, lambda, cfg, opts);
        if (!fit.converged || fit.support.size() > 2) continue;
        if (!kkt_violation(fit.beta, inst.data, spec, lambda, 10.0 * cfg.tol).satisfied) continue;
        ++eligible;
        holds += l2_bound_check(fit.beta, inst.data, inst.truth, lambda, 1.0).holds ? 1 : 0;
    }
    const bool pass = eligible > 0 && holds >= 0.95 * eligible;
    verdict("6f l2 bound rate", pass,
            std::to_string(holds) + "/" + std::to_string(eligible) + " sparse stationary points (>= 95%)");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion_6g() {
    const Clock c;
    std::ostringstream sink;
    bool same = true;
    std::string detail;
    const std::vector<std::vector<std::string>> invocations = {
        {"simulate", "case1a", "--p", "300", "--reps", "4", "--methods", "new,lasso,scad,hlasso,oracle", "--seed", "11"},
        {"simulate", "case2a", "--p", "400", "--reps", "2", "--methods", "new,hlasso,oracle", "--seed", "12"},
        {"simulate", "logit", "--p", "200", "--reps", "3", "--seed", "13"},
    };
    for (const auto& base : invocations) {
        std::string first;
        for (const char* threads : {"1", "1", "4"}) {
            auto args = base;
            args.insert(args.end(), {"--threads", threads, "--out", "acceptance_det.json"});
            if (cli::run(args, sink, sink) != 0) {
                same = false;
                detail += base[1] + " failed to run; ";
                break;
            }
            const std::string text = slurp("acceptance_det.json");
            if (first.empty())
                first = text;
            else if (text != first)
                same = false;
        }
        detail += base[1] + (same ? " identical; " : " differs; ");
    }
    verdict("6g determinism", same, detail + c.elapsed());
}

}  // namespace

int main() {
    std::cout << "acceptance suite (Monte Carlo criteria use 100 reps, 50 for the logistic design)" << std::endl;
    criterion_6a();
    criterion_6b();
    criterion_6c();
    criterion_6d();
    criterion_6e();
    criterion_6f();
    criterion_6g();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
