#pragma once

#include <vector>

#include "errors.hpp"
#include "milp.hpp"

namespace wildgrid {

enum class SolveStatus { Optimal, Infeasible, Unbounded, LimitReached };

struct SolveOutcome {
    SolveStatus status = SolveStatus::Optimal;
    double objective = 0.0;          // includes the model's objective offset
    double dual_bound = 0.0;         // MIP lower bound; equals objective for LPs
    double gap = 0.0;                // relative MIP gap reported by the solver
    double wall_time = 0.0;          // seconds
    std::vector<double> primal;      // empty when no feasible point is available
    std::vector<double> row_duals;   // LP solves only: duals of equality rows, NaN elsewhere

    bool feasible() const { return !primal.empty(); }
};

struct SolverParams {
    double mip_gap = 1e-6;
    double time_limit = 1e9;  // seconds
    int threads = 1;          // reference backend is single-threaded; kept for conforming backends
    long seed = 0;

    SolverParams with_gap(double g) const {
        SolverParams p = *this;
        p.mip_gap = g;
        return p;
    }
};

// Narrow interface to the MILP engine. The reference backend drives scipy's
// bundled HiGHS through an embedded CPython interpreter; LP duals come from a
// dual-simplex solve (basic optimal duals, deterministic). All calls are
// serialized internally. The WILDGRID_BACKEND environment variable selects the
// backend when several are compiled in; "scipy-highs" is the only one here.
class MilpBackend {
  public:
    static MilpBackend& instance();

    SolveOutcome solve_mip(const MilpModel& model, const SolverParams& params);
    // Requires a continuous model (relax binaries first); fills row_duals.
    SolveOutcome solve_lp(const MilpModel& model, const SolverParams& params);

    // Convex QP: min 0.5 x'Px + q'x s.t. Gx <= h, Ax = b (dense, row-major).
    // Used by the cut factory's bundle and min-norm masters.
    struct QpResult {
        bool ok = false;
        std::vector<double> x;
    };
    QpResult solve_qp(int n, const std::vector<double>& P, const std::vector<double>& q,
                      const std::vector<double>& G, const std::vector<double>& h,
                      const std::vector<double>& A, const std::vector<double>& b);

    MilpBackend(const MilpBackend&) = delete;
    MilpBackend& operator=(const MilpBackend&) = delete;

  private:
    MilpBackend();
    struct Impl;
    Impl* impl_;
};

}  // namespace wildgrid
