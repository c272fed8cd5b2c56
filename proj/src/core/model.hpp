#pragma once

#include <map>
#include <string>
#include <vector>

#include "cut_record.hpp"
#include "grid.hpp"
#include "milp.hpp"
#include "scenario.hpp"

namespace wildgrid {

struct FormulationOptions {
    double beta = 0.4;             // fairness level, >= 0
    bool restoration = true;       // restoration logic in the root problem
    bool fairness_enabled = true;  // pairwise cumulative-shed caps in the root problem
};

// Variable index tables for one stage block living inside a MilpModel.
// Periods are absolute: t in [t_begin, t_end]; index with at(table, c, t).
struct StageVars {
    int t_begin = 1;
    int t_end = 0;
    std::vector<std::vector<int>> z;   // [component][t - t_begin], binary
    std::vector<std::vector<int>> r;   // restoration, root only
    std::vector<std::vector<int>> s;   // [load][...], shed fraction in [0,1]
    std::vector<std::vector<int>> pg;  // [generator][...]
    std::vector<std::vector<int>> pl;  // [line][...]
    std::vector<std::vector<int>> th;  // [bus][...], voltage angle
    std::vector<int> nu;               // [component], node blocks only
    std::vector<int> zcopy;            // [component], local copy of z_{tau-1}, node blocks only

    int periods() const { return t_end - t_begin + 1; }
};

// One stage optimization problem: the root problem or a node subproblem, as a
// solver-agnostic MILP plus the semantic handles the engine and cut factory
// need (copy rows for duals, V variables per non-nominal child).
struct StageModel {
    MilpModel milp;
    std::string owner;  // "root" or a node id
    StageVars vars;
    std::vector<int> copy_rows;            // nonanticipativity rows, node models only
    std::vector<double> anchor;            // zhat the copy rows pin, node models only
    std::vector<std::string> child_ids;    // non-nominal children carrying a V variable
    std::vector<double> child_probs;       // p for each child above
    std::vector<int> child_onsets;         // tau for each child above
    std::vector<int> value_vars;           // V variable per child above
    double nominal_prob = 1.0;
    int cut_count = 0;
};

// Values of one solved stage model.
struct StageSolution {
    int t_begin = 1;
    int t_end = 0;
    std::vector<std::vector<double>> z, r, s, pg, pl, th;
    std::vector<double> nu;
    std::vector<double> value_estimates;  // Vhat per child, parallel to child_ids
    double objective = 0.0;
    double immediate_cost = 0.0;  // objective minus sum(p * Vhat): shed + damage

    // Rounded binary shutoff state z_{.,period}; the anchor handed to children.
    std::vector<double> shutoff_state(int period) const;
};

// Root problem over t = 1..T with one epigraph variable per non-nominal child
// and all pool cuts attached. Throws ValidationError on an inconsistent tree.
StageModel build_root(const PowerNetwork& net, const ScenarioTree& tree,
                      const FormulationOptions& options, const CutPool& pool);

// Node subproblem over t = tau..T with fire-damage logic, monotone shutoff,
// and nonanticipativity copy rows pinned to `anchor` (binary, length |C|).
StageModel build_node(const PowerNetwork& net, const ScenarioTree& tree, const std::string& node_id,
                      const CutPool& pool, const std::vector<double>& anchor);

// Replaces every integrality restriction with its interval relaxation.
StageModel relax_binaries(StageModel model);

// Adds V_owner >= slope'(z_{tau-1} - anchor) + intercept to the model owning
// cut.owner as a child. Throws DimensionMismatchError.
void attach_cut(StageModel& model, const CutRecord& cut);

StageSolution extract_solution(const StageModel& model, const std::vector<double>& primal,
                               double objective);

// Pulls one stage block's values out of a composed model's primal vector.
StageSolution extract_stage_values(const StageVars& vars, const std::vector<double>& primal);

// Internal building block shared with the extensive-form composer.
struct StageBlockSpec {
    int t_begin = 1;
    bool restoration = false;
    bool fairness = false;
    double beta = 0.0;
    bool with_copy = false;    // create zcopy vars and the monotone link to them
    bool with_damage = false;  // create nu vars and fire rows (needs realization)
    bool fairness_force_pairwise = false;  // plan checker: no auxiliary max/min columns
    const DisruptionRealization* realization = nullptr;
    std::vector<double> shed_weight_by_t;  // per t in [t_begin..T]; multiplies w_d
    double damage_weight = 1.0;            // multiplies c^r_c on nu
};

StageVars add_stage_block(MilpModel& milp, const PowerNetwork& net, const StageBlockSpec& spec);

// Probability-weighted shed horizon: weight[t] = sum over children (including
// the nominal mass) of p * [t < tau_child], for t in [t_begin..T].
std::vector<double> pre_disruption_weights(const ScenarioTree& tree, const std::string& node_id,
                                           int t_begin);

}  // namespace wildgrid
