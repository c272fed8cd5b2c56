#pragma once

#include <vector>

#include "model.hpp"
#include "solver.hpp"

namespace wildgrid {

// Parameters for the Lagrangian-dual search used by LC and SMC generation.
struct DualSolverParams {
    int max_oracle_calls = 100;
    double tolerance = 1e-6;            // relative optimality/feasibility tolerance
    double stabilization = 10.0;        // initial proximal weight, halved on serious steps
    std::vector<double> initial_point;  // lambda_0; empty uses the Benders dual warm start
};

struct LagrangianValue {
    double value = 0.0;                   // R(zhat, lambda; Z)
    std::vector<double> subgradient;      // zhat - zcopy* (supergradient of the concave dual)
};

// Evaluates the Lagrangian relaxation of a node subproblem at `lambda`: copy
// rows dropped, objective += lambda'(zhat - zcopy), copy variables restricted
// to `domain`. One MIP solve.
LagrangianValue lagrangian_value(const StageModel& sub, const std::vector<double>& lambda,
                                 ZDomain domain, const SolverParams& solver);

// Benders cut: LP relaxation of the augmented subproblem; slope = basic
// optimal duals of the copy rows, intercept = LP optimal value.
CutRecord benders_cut(const StageModel& sub, const SolverParams& solver);

// Strengthened Benders: the BC slope with the intercept recomputed by one
// Lagrangian evaluation at that slope.
CutRecord strengthened_benders_cut(const StageModel& sub, ZDomain domain,
                                   const SolverParams& solver);

// Lagrangian cut: maximizes the concave dual by a proximal-bundle method.
// Tight at the anchor (binary domain) up to the bundle tolerance; on oracle
// exhaustion the best valid cut found is returned with tight = false.
CutRecord lagrangian_cut(const StageModel& sub, ZDomain domain, const DualSolverParams& dual,
                         const SolverParams& solver);

// Square-minimization cut: min-norm slope subject to the dual value staying
// within a delta neighborhood of the subproblem value at the anchor, solved by
// outer approximation with a convex-QP master seeded from a Lagrangian bundle
// run. Falls back to the Lagrangian result when the target is unreachable.
CutRecord square_min_cut(const StageModel& sub, double delta, ZDomain domain,
                         const DualSolverParams& dual, const SolverParams& solver);

}  // namespace wildgrid
