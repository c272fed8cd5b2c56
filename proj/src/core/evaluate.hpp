#pragma once

#include <map>
#include <string>
#include <vector>

#include "engine.hpp"

namespace wildgrid {

// The root-stage incumbent: the shutoff/restoration/shed/dispatch plan
// implemented until a disruption arrives.
struct NominalPlan {
    FormulationOptions options;
    StageSolution root;  // periods 1..T
};

NominalPlan plan_from_report(const SolveReport& report, const ScenarioTree& tree,
                             const FormulationOptions& options);
std::string plan_to_json_text(const NominalPlan& plan, const PowerNetwork& net);
// Re-checks problem feasibility for the plan's beta/restoration flags; throws
// InfeasiblePlanError.
NominalPlan plan_from_json_text(const std::string& text, const PowerNetwork& net);
void save_plan(const NominalPlan& plan, const PowerNetwork& net, const std::string& path);
NominalPlan load_plan(const std::string& path, const PowerNetwork& net);
void check_plan(const NominalPlan& plan, const PowerNetwork& net, double tol = 1e-6);

struct EvaluationBreakdown {
    double nominal_shed_cost = 0.0;
    double disruptive_shed_cost = 0.0;
    double damage_cost = 0.0;
    double total = 0.0;
    int scenario_count = 0;
};

struct ExtensiveSolution {
    double value = 0.0;
    std::map<std::string, StageSolution> by_node;
};

// Monolithic MIP over the whole tree with explicit copy rows; the correctness
// oracle for the decomposition. Refuses trees beyond 50 nodes or 60 components.
ExtensiveSolution extensive_form_solve(const PowerNetwork& net, const ScenarioTree& tree,
                                       const FormulationOptions& options,
                                       const SolverParams& params);

// Exact cost-to-go of the subtree rooted at `node_id` given the inherited
// shutoff state: one monolithic MIP. Same size guard as the extensive form.
double node_value_exact(const PowerNetwork& net, const ScenarioTree& tree,
                        const std::string& node_id, const std::vector<double>& anchor,
                        const SolverParams& params,
                        std::map<std::string, StageSolution>* solutions = nullptr);

// Out-of-sample cost of a fixed nominal plan on a testing tree: pre-disruption
// shed from the plan plus exact recourse per scenario, probability weighted.
EvaluationBreakdown evaluate_out_of_sample(const NominalPlan& plan, const PowerNetwork& net,
                                           const ScenarioTree& testing,
                                           const SolverParams& params);

struct FairnessMetrics {
    double max_pairwise_gap = 0.0;      // max_{d,d'} sum_t (s_dt - s_d't)
    double total_shed_fraction = 0.0;   // demand-weighted shed share
    std::vector<double> per_load_cum_shed;  // (1/T) sum_t s_dt per load
};

FairnessMetrics fairness_metrics(const NominalPlan& plan, const PowerNetwork& net);

struct ComparisonRow {
    bool restoration = false;
    double beta = 0.0;
    double nominal_shed = 0.0;
    double disruptive_shed = 0.0;
    double damage = 0.0;
    double total = 0.0;
    double root_objective = 0.0;  // in-sample optimum, not part of the CSV schema
};

// Solves with and without restoration per beta and evaluates both plans
// out-of-sample (Table-II-shaped rows).
std::vector<ComparisonRow> compare_restoration(const PowerNetwork& net, const ScenarioTree& tree,
                                               const ScenarioTree& testing,
                                               const std::vector<double>& betas,
                                               const FormulationOptions& base_options,
                                               const EngineConfig& config);

struct FairnessRow {
    double beta = 0.0;
    std::string load_id;
    double cum_shed_frac = 0.0;
};

void write_fairness_csv(const std::string& path, const std::vector<FairnessRow>& rows);
void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows);
void write_breakdown_csv(const std::string& path, const EvaluationBreakdown& b);

// Writes convergence.csv, summary.json and any optional sections into out_dir.
void emit_reports(const std::string& out_dir, const SolveReport& report,
                  const EvaluationBreakdown* breakdown, const std::vector<FairnessRow>* fairness,
                  const std::vector<ComparisonRow>* comparison, const std::string& config_echo);

}  // namespace wildgrid
