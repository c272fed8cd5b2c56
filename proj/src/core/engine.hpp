#pragma once

#include <map>
#include <string>
#include <vector>

#include "cuts.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace wildgrid {

enum class StopReason { Converged, GapStall, IterationLimit, TimeLimit };
std::string to_string(StopReason r);

struct EngineConfig {
    double epsilon = 0.01;  // relative gap target
    int max_iterations = 500;
    double max_wall_time = 1e9;  // seconds
    CutFamily cut_family = CutFamily::LC;
    ZDomain z_domain = ZDomain::Binary;
    double delta = 1e-4;  // SMC neighborhood
    DualSolverParams dual;

    double forward_mip_gap = 1e-4;   // forward-pass (and root) solves
    double backward_mip_gap = 1e-6;  // cut-generation solves
    SolverParams solver;             // time limit / threads / seed template

    // BC and SBC cannot close integrality gaps; a flat LB plateau terminates
    // the run instead of looping forever.
    double stall_improvement = 1e-9;
    int stall_iterations = 5;

    std::string trace_csv;     // written when nonempty: iter,lb,ub,gap,cuts_added,seconds
    std::string cut_log_json;  // written when nonempty: per-cut JSON log
    std::string lp_dump_dir;   // written when nonempty: LP-format model dumps

    SolverParams forward_params() const { return solver.with_gap(forward_mip_gap); }
    SolverParams backward_params() const { return solver.with_gap(backward_mip_gap); }
};

struct IterationRecord {
    int iter = 0;
    double lb = 0.0;
    double ub = 0.0;
    double gap = 0.0;
    int cuts_added = 0;
    double seconds = 0.0;  // cumulative wall time
};

struct SolveReport {
    std::vector<IterationRecord> trace;
    std::map<std::string, StageSolution> incumbent;  // root + non-nominal nodes
    double lower_bound = 0.0;
    double upper_bound = kInf;
    double gap = kInf;
    StopReason reason = StopReason::IterationLimit;
    int total_cuts = 0;
    double wall_time = 0.0;
    CutPool pool;  // final cut pool, kept for validity auditing and the cut log
};

class DecompositionEngine {
  public:
    DecompositionEngine(const PowerNetwork& net, const ScenarioTree& tree,
                        const FormulationOptions& options, const EngineConfig& config);

    struct ForwardResult {
        std::map<std::string, StageSolution> solutions;
        double lb_candidate = 0.0;  // dual bound of the root relaxation
        double ub_candidate = 0.0;  // cost of the nonanticipative policy of this pass
    };

    // One forward sweep: root solve plus a depth-first traversal of all
    // disruption nodes at the parent anchors.
    ForwardResult forward_pass();

    // One backward sweep at the forward anchors, deepest stage first; returns
    // the number of cuts accepted into the pool.
    int backward_pass(const ForwardResult& fw, int iteration);

    SolveReport run();

    const CutPool& pool() const { return pool_; }

  private:
    StageSolution solve_stage(const StageModel& model, const SolverParams& params) const;
    CutRecord make_cut(const StageModel& sub) const;
    void dump_model(const StageModel& model, int iteration) const;

    const PowerNetwork& net_;
    const ScenarioTree& tree_;
    FormulationOptions options_;
    EngineConfig config_;
    CutPool pool_;
};

SolveReport run(const PowerNetwork& net, const ScenarioTree& tree,
                const FormulationOptions& options, const EngineConfig& config);

// Diagnostic used by reports and tests.
bool lower_bound_is_monotone(const SolveReport& report);

void write_trace_csv(const SolveReport& report, const std::string& path);
void write_cut_log_json(const SolveReport& report, const std::string& path);

}  // namespace wildgrid
