#include "cuts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace wildgrid {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2sq(const std::vector<double>& a) { return dot(a, a); }

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

MilpModel lagrangian_model(const StageModel& sub, const std::vector<double>& lambda,
                           ZDomain domain) {
    MilpModel m = sub.milp;
    for (int row : sub.copy_rows) {
        m.row_lb[row] = -kInf;
        m.row_ub[row] = kInf;
    }
    const auto& zcopy = sub.vars.zcopy;
    for (size_t c = 0; c < zcopy.size(); ++c) {
        m.is_integer[zcopy[c]] = (domain == ZDomain::Binary) ? 1 : 0;
        m.obj[zcopy[c]] -= lambda[c];
    }
    m.obj_offset += dot(lambda, sub.anchor);
    return m;
}

// Bundle entry: a linearization R(l) <= value + g'(l - point).
struct BundleEntry {
    std::vector<double> point;
    double value;
    std::vector<double> subgradient;
};

struct BundleRun {
    std::vector<BundleEntry> bundle;
    std::vector<double> best_point;
    double best_value = -kInf;
    int oracle_calls = 0;
    bool converged = false;
};

// Proximal-bundle ascent on the concave dual. The master QP is solved in its
// dual form over the simplex: min_a a'e + ||G a||^2 / (2u), step = G a / u.
BundleRun maximize_dual(const StageModel& sub, ZDomain domain, const DualSolverParams& dp,
                        const SolverParams& sp, const std::vector<double>& start) {
    const size_t n = start.size();
    BundleRun run;
    auto oracle = [&](const std::vector<double>& lam) {
        LagrangianValue lv = lagrangian_value(sub, lam, domain, sp);
        ++run.oracle_calls;
        run.bundle.push_back({lam, lv.value, lv.subgradient});
        if (lv.value > run.best_value) {
            run.best_value = lv.value;
            run.best_point = lam;
        }
        return lv;
    };

    oracle(start);
    std::vector<double> center = start;
    double center_value = run.best_value;
    double u = dp.stabilization;
    constexpr size_t kBundleCap = 60;

    while (run.oracle_calls < dp.max_oracle_calls) {
        const size_t K = run.bundle.size();
        // e_k: linearization values at the center
        std::vector<double> e(K);
        for (size_t k = 0; k < K; ++k) {
            const BundleEntry& bk = run.bundle[k];
            e[k] = bk.value;
            for (size_t i = 0; i < n; ++i) e[k] += bk.subgradient[i] * (center[i] - bk.point[i]);
        }
        // dual master: min 0.5 a'Qa + e'a, Q = G'G/u, a in simplex
        std::vector<double> P(K * K, 0.0);
        for (size_t k = 0; k < K; ++k)
            for (size_t k2 = k; k2 < K; ++k2) {
                double g = dot(run.bundle[k].subgradient, run.bundle[k2].subgradient) / u;
                P[k * K + k2] = g;
                P[k2 * K + k] = g;
            }
        for (size_t k = 0; k < K; ++k) P[k * K + k] += 1e-12;  // ridge for the IP solver
        std::vector<double> G(K * K, 0.0), h(K, 0.0);
        for (size_t k = 0; k < K; ++k) G[k * K + k] = -1.0;
        std::vector<double> A(K, 1.0), b{1.0};

        auto qp = MilpBackend::instance().solve_qp(static_cast<int>(K), P, e, G, h, A, b);
        if (!qp.ok) {
            u *= 10.0;
            if (u > 1e12) break;
            continue;
        }
        std::vector<double> trial(center);
        for (size_t k = 0; k < K; ++k)
            for (size_t i = 0; i < n; ++i) trial[i] += qp.x[k] * run.bundle[k].subgradient[i] / u;
        double model_at_trial = kInf;
        for (size_t k = 0; k < K; ++k) {
            double val = run.bundle[k].value;
            for (size_t i = 0; i < n; ++i)
                val += run.bundle[k].subgradient[i] * (trial[i] - run.bundle[k].point[i]);
            model_at_trial = std::min(model_at_trial, val);
        }
        double predicted = model_at_trial - center_value;
        if (predicted <= dp.tolerance * std::max(1.0, std::abs(center_value))) {
            run.converged = true;
            break;
        }
        LagrangianValue lv = oracle(trial);
        if (lv.value - center_value >= 0.1 * predicted) {
            center = trial;
            center_value = lv.value;
            u = std::max(u * 0.5, 1e-6);
        }
        if (run.bundle.size() > kBundleCap)
            run.bundle.erase(run.bundle.begin(), run.bundle.begin() + (run.bundle.size() - kBundleCap));
    }
    return run;
}

CutRecord base_record(const StageModel& sub, CutFamily family, ZDomain domain) {
    CutRecord cut;
    cut.owner = sub.owner;
    cut.anchor = sub.anchor;
    cut.family = family;
    cut.z_domain = domain;
    return cut;
}

}  // namespace

LagrangianValue lagrangian_value(const StageModel& sub, const std::vector<double>& lambda,
                                 ZDomain domain, const SolverParams& solver) {
    if (lambda.size() != sub.anchor.size())
        throw DimensionMismatchError("lambda dimension != component count");
    for (double l : lambda)
        if (!std::isfinite(l)) throw InvalidParamsError("lambda must be finite");

    MilpModel m = lagrangian_model(sub, lambda, domain);
    SolveOutcome out = MilpBackend::instance().solve_mip(m, solver);
    if (!out.feasible())
        throw CutGenerationError("Lagrangian relaxation solve failed for node " + sub.owner);
    LagrangianValue lv;
    // the dual bound keeps the cut valid even under a nonzero mip gap
    lv.value = out.dual_bound;
    lv.subgradient.resize(lambda.size());
    for (size_t c = 0; c < lambda.size(); ++c)
        lv.subgradient[c] = sub.anchor[c] - out.primal[sub.vars.zcopy[c]];
    return lv;
}

CutRecord benders_cut(const StageModel& sub, const SolverParams& solver) {
    Timer timer;
    StageModel relaxed = relax_binaries(sub);
    SolveOutcome out = MilpBackend::instance().solve_lp(relaxed.milp, solver);
    if (out.status != SolveStatus::Optimal)
        throw CutGenerationError("LP relaxation not solved to optimality for node " + sub.owner);
    CutRecord cut = base_record(sub, CutFamily::BC, ZDomain::Interval);
    cut.intercept = out.objective;
    cut.slope.resize(sub.copy_rows.size());
    for (size_t c = 0; c < sub.copy_rows.size(); ++c) {
        double d = out.row_duals[sub.copy_rows[c]];
        cut.slope[c] = std::isnan(d) ? 0.0 : d;
    }
    cut.oracle_calls = 1;
    cut.wall_time = timer.seconds();
    return cut;
}

CutRecord strengthened_benders_cut(const StageModel& sub, ZDomain domain,
                                   const SolverParams& solver) {
    Timer timer;
    CutRecord cut = benders_cut(sub, solver);
    LagrangianValue lv = lagrangian_value(sub, cut.slope, domain, solver);
    cut.family = CutFamily::SBC;
    cut.z_domain = domain;
    cut.intercept = std::max(cut.intercept, lv.value);
    cut.oracle_calls = 2;
    cut.wall_time = timer.seconds();
    return cut;
}

CutRecord lagrangian_cut(const StageModel& sub, ZDomain domain, const DualSolverParams& dual,
                         const SolverParams& solver) {
    Timer timer;
    std::vector<double> start = dual.initial_point;
    int warm_calls = 0;
    if (start.empty()) {
        start = benders_cut(sub, solver).slope;
        warm_calls = 1;
    }
    BundleRun run = maximize_dual(sub, domain, dual, solver, start);
    CutRecord cut = base_record(sub, CutFamily::LC, domain);
    cut.slope = run.best_point;
    cut.intercept = run.best_value;
    cut.tight = run.converged;
    cut.oracle_calls = run.oracle_calls + warm_calls;
    cut.wall_time = timer.seconds();
    return cut;
}

CutRecord square_min_cut(const StageModel& sub, double delta, ZDomain domain,
                         const DualSolverParams& dual, const SolverParams& solver) {
    if (delta < 0.0) throw InvalidParamsError("delta must be >= 0");
    Timer timer;

    // anchor value of the augmented subproblem (one MIP solve)
    SolveOutcome anchored = MilpBackend::instance().solve_mip(sub.milp, solver);
    if (!anchored.feasible())
        throw CutGenerationError("subproblem solve failed for node " + sub.owner);
    double f_hat = anchored.dual_bound;
    double target = f_hat - delta * std::abs(f_hat);
    double feas_tol = dual.tolerance * std::max(1.0, std::abs(f_hat));

    std::vector<double> start = dual.initial_point;
    int extra_calls = 1;
    if (start.empty()) {
        start = benders_cut(sub, solver).slope;
        ++extra_calls;
    }
    BundleRun run = maximize_dual(sub, domain, dual, solver, start);

    CutRecord cut = base_record(sub, CutFamily::SMC, domain);
    cut.oracle_calls = run.oracle_calls + extra_calls;

    if (run.best_value < target - feas_tol) {
        // delta neighborhood unreachable (interval-domain duality gap):
        // fall back to the Lagrangian result, still a valid cut
        cut.slope = run.best_point;
        cut.intercept = run.best_value;
        cut.tight = false;
        cut.wall_time = timer.seconds();
        return cut;
    }

    std::vector<double> best = run.best_point;
    double best_value = run.best_value;
    double best_norm = norm2sq(best);
    const size_t n = best.size();

    // outer approximation: min ||l||^2 over linearizations of R(l) >= target;
    // the dual search above and this loop each get max_oracle_calls
    while (run.oracle_calls < 2 * dual.max_oracle_calls) {
        const size_t K = run.bundle.size();
        std::vector<double> P(n * n, 0.0), q(n, 0.0);
        for (size_t i = 0; i < n; ++i) P[i * n + i] = 2.0;
        std::vector<double> G(K * n), h(K);
        for (size_t k = 0; k < K; ++k) {
            const BundleEntry& bk = run.bundle[k];
            for (size_t i = 0; i < n; ++i) G[k * n + i] = -bk.subgradient[i];
            h[k] = bk.value - dot(bk.subgradient, bk.point) - target;
        }
        auto qp = MilpBackend::instance().solve_qp(static_cast<int>(n), P, q, G, h, {}, {});
        if (!qp.ok) break;
        double master_norm = norm2sq(qp.x);
        if (master_norm >= best_norm * (1.0 - 1e-9) - 1e-12) break;  // cannot improve on best
        LagrangianValue lv = lagrangian_value(sub, qp.x, domain, solver);
        ++run.oracle_calls;
        run.bundle.push_back({qp.x, lv.value, lv.subgradient});
        if (lv.value >= target - feas_tol) {
            best = qp.x;
            best_value = lv.value;
            best_norm = master_norm;
            break;  // feasible at the master's lower bound: min-norm up to tolerance
        }
    }

    cut.slope = best;
    cut.intercept = best_value;
    cut.tight = true;
    cut.oracle_calls = run.oracle_calls + extra_calls;
    cut.wall_time = timer.seconds();
    return cut;
}

}  // namespace wildgrid
