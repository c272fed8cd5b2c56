#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wildgrid {

std::string to_string(CutFamily f) {
    switch (f) {
        case CutFamily::BC: return "BC";
        case CutFamily::SBC: return "SBC";
        case CutFamily::LC: return "LC";
        case CutFamily::SMC: return "SMC";
    }
    return "BC";
}

std::string to_string(ZDomain z) { return z == ZDomain::Binary ? "binary" : "interval"; }

CutFamily cut_family_from_string(const std::string& s) {
    if (s == "BC") return CutFamily::BC;
    if (s == "SBC") return CutFamily::SBC;
    if (s == "LC") return CutFamily::LC;
    if (s == "SMC") return CutFamily::SMC;
    throw ConfigError("unknown cut family: " + s);
}

ZDomain z_domain_from_string(const std::string& s) {
    if (s == "binary") return ZDomain::Binary;
    if (s == "interval") return ZDomain::Interval;
    throw ConfigError("unknown z domain: " + s);
}

bool CutPool::add(CutRecord cut) {
    std::ostringstream key;
    key.precision(17);
    key << cut.owner << "|" << cut.intercept << "|";
    for (double v : cut.slope) key << v << ",";
    key << "|";
    for (double v : cut.anchor) key << v << ",";
    if (!seen_.insert(key.str()).second) return false;
    by_owner_[cut.owner].push_back(std::move(cut));
    ++total_;
    return true;
}

const std::vector<CutRecord>& CutPool::for_node(const std::string& owner) const {
    static const std::vector<CutRecord> empty;
    auto it = by_owner_.find(owner);
    return it == by_owner_.end() ? empty : it->second;
}

// ---------------------------------------------------------------------------
// stage block emission

std::vector<double> pre_disruption_weights(const ScenarioTree& tree, const std::string& node_id,
                                           int t_begin) {
    int T = tree.horizon_T;
    std::vector<double> w(static_cast<size_t>(T - t_begin + 1), 0.0);
    double nominal = tree.nominal_mass(node_id);
    for (int t = t_begin; t <= T; ++t) w[t - t_begin] += nominal;  // nominal tau = T+1
    for (const std::string& cid : tree.disruption_children(node_id)) {
        const DisruptionRealization& c = tree.node(cid);
        for (int t = t_begin; t < c.onset; ++t) w[t - t_begin] += c.probability;
    }
    return w;
}

StageVars add_stage_block(MilpModel& m, const PowerNetwork& net, const StageBlockSpec& spec) {
    const int T = static_cast<int>(spec.shed_weight_by_t.size()) + spec.t_begin - 1;
    const int nT = T - spec.t_begin + 1;
    const int C = net.component_count();
    if (nT < 1) throw ValidationError("stage block with no periods");

    StageVars v;
    v.t_begin = spec.t_begin;
    v.t_end = T;

    auto grid2 = [&](int n) { return std::vector<std::vector<int>>(n, std::vector<int>(nT, -1)); };
    v.z = grid2(C);
    if (spec.restoration) v.r = grid2(C);
    v.s = grid2(net.load_count());
    v.pg = grid2(net.generator_count());
    v.pl = grid2(net.line_count());
    v.th = grid2(net.bus_count());

    for (int c = 0; c < C; ++c)
        for (int k = 0; k < nT; ++k) v.z[c][k] = m.add_col(0.0, 1.0, 0.0, true);
    if (spec.restoration)
        for (int c = 0; c < C; ++c)
            for (int k = 0; k < nT; ++k) v.r[c][k] = m.add_col(0.0, 1.0, 0.0, true);
    for (int d = 0; d < net.load_count(); ++d)
        for (int k = 0; k < nT; ++k)
            v.s[d][k] = m.add_col(0.0, 1.0,
                                  net.loads[d].priority * spec.shed_weight_by_t[k], false);
    for (int g = 0; g < net.generator_count(); ++g)
        for (int k = 0; k < nT; ++k)
            v.pg[g][k] = m.add_col(0.0, net.generators[g].p_max, 0.0, false);
    for (int l = 0; l < net.line_count(); ++l)
        for (int k = 0; k < nT; ++k)
            v.pl[l][k] = m.add_col(-net.lines[l].thermal_limit, net.lines[l].thermal_limit, 0.0, false);
    for (int b = 0; b < net.bus_count(); ++b)
        for (int k = 0; k < nT; ++k) {
            double bound = (b == net.reference_bus()) ? 0.0 : net.angle_bound;
            v.th[b][k] = m.add_col(-bound, bound, 0.0, false);
        }
    if (spec.with_damage) {
        v.nu.resize(C, -1);
        for (int c = 0; c < C; ++c)
            v.nu[c] = m.add_col(0.0, 1.0, spec.damage_weight * net.component_damage_cost(c), true);
    }
    if (spec.with_copy) {
        v.zcopy.resize(C, -1);
        for (int c = 0; c < C; ++c) v.zcopy[c] = m.add_col(0.0, 1.0, 0.0, true);
    }

    // DC flow with switching, per period
    for (int k = 0; k < nT; ++k) {
        for (int l = 0; l < net.line_count(); ++l) {
            const Line& ln = net.lines[l];
            int fi = net.bus_index_of(ln.from_bus), ti = net.bus_index_of(ln.to_bus);
            double coeff = net.line_coeff(l);
            double M = net.big_m_angle * coeff;
            int zl = v.z[net.component_of_line(l)][k];
            // energized: P = coeff * (theta_to - theta_from); de-energized: relaxed
            m.add_row({{v.pl[l][k], 1.0}, {v.th[fi][k], coeff}, {v.th[ti][k], -coeff}, {zl, M}},
                      -kInf, M);
            m.add_row({{v.pl[l][k], 1.0}, {v.th[fi][k], coeff}, {v.th[ti][k], -coeff}, {zl, -M}},
                      -M, kInf);
            // thermal limit, zero when open
            m.add_row({{v.pl[l][k], 1.0}, {zl, -ln.thermal_limit}}, -kInf, 0.0);
            m.add_row({{v.pl[l][k], 1.0}, {zl, ln.thermal_limit}}, 0.0, kInf);
        }
        // nodal balance: gen + inflow = served demand
        for (int b = 0; b < net.bus_count(); ++b) {
            const auto& inc = net.incidence(b);
            std::vector<std::pair<int, double>> row;
            double rhs = 0.0;
            for (int g : inc.generators) row.push_back({v.pg[g][k], 1.0});
            for (int l : inc.lines) {
                bool at_from = net.bus_index_of(net.lines[l].from_bus) == b;
                row.push_back({v.pl[l][k], at_from ? 1.0 : -1.0});
            }
            for (int d : inc.loads) {
                double dem = net.loads[d].demand_by_period[spec.t_begin + k - 1];
                row.push_back({v.s[d][k], dem});
                rhs += dem;
            }
            m.add_row(std::move(row), rhs, rhs);
        }
        // generation limits tied to the switch state
        for (int g = 0; g < net.generator_count(); ++g) {
            int zg = v.z[net.component_of_generator(g)][k];
            m.add_row({{v.pg[g][k], 1.0}, {zg, -net.generators[g].p_max}}, -kInf, 0.0);
            if (net.generators[g].p_min > 0.0)
                m.add_row({{v.pg[g][k], 1.0}, {zg, -net.generators[g].p_min}}, 0.0, kInf);
        }
        // component logic: bus shutoff forces loads shed and members off
        for (int b = 0; b < net.bus_count(); ++b) {
            const auto& inc = net.incidence(b);
            int zb = v.z[net.component_of_bus(b)][k];
            for (int d : inc.loads)
                m.add_row({{v.s[d][k], 1.0}, {zb, 1.0}}, 1.0, kInf);
            for (int g : inc.generators)
                m.add_row({{zb, 1.0}, {v.z[net.component_of_generator(g)][k], -1.0}}, 0.0, kInf);
            for (int l : inc.lines)
                m.add_row({{zb, 1.0}, {v.z[net.component_of_line(l)][k], -1.0}}, 0.0, kInf);
        }
    }

    // temporal logic
    for (int c = 0; c < C; ++c) {
        if (spec.restoration) {
            for (int k = 1; k < nT; ++k) {
                m.add_row({{v.r[c][k - 1], 1.0}, {v.r[c][k], -1.0}}, 0.0, kInf);
                // a component may be re-energized only while its restoration
                // budget steps down: r_{t-1} - r_t >= z_t - z_{t-1}
                m.add_row({{v.r[c][k - 1], 1.0}, {v.r[c][k], -1.0}, {v.z[c][k], -1.0}, {v.z[c][k - 1], 1.0}},
                          0.0, kInf);
            }
        } else {
            for (int k = 1; k < nT; ++k)
                m.add_row({{v.z[c][k - 1], 1.0}, {v.z[c][k], -1.0}}, 0.0, kInf);
        }
        if (spec.with_copy) {
            // shut-off state carries into the stage: z_{tau} <= zcopy
            m.add_row({{v.zcopy[c], 1.0}, {v.z[c][0], -1.0}}, 0.0, kInf);
        }
    }

    // fire damage
    if (spec.with_damage) {
        if (!spec.realization) throw ValidationError("damage block without a realization");
        for (int c = 0; c < C; ++c)
            for (int k = 0; k < nT; ++k)
                m.add_row({{v.z[c][k], 1.0}, {v.nu[c], 1.0}}, -kInf, 1.0);
        for (int c : spec.realization->exogenous_components) m.col_lb[v.nu[c]] = 1.0;
        if (!spec.with_copy && !spec.realization->fault_components.empty())
            throw ValidationError("endogenous fire rows need copy variables");
        for (int c : spec.realization->fault_components) {
            auto it = spec.realization->spread_sets.find(c);
            if (it == spec.realization->spread_sets.end())
                throw ValidationError("fault component without a spread set");
            for (int k_comp : it->second)
                m.add_row({{v.nu[k_comp], 1.0}, {v.zcopy[c], -1.0}}, 0.0, kInf);
        }
    }

    // fairness caps on cumulative shed differences (root only)
    if (spec.fairness) {
        int D = net.load_count();
        double cap = spec.beta * static_cast<double>(T);
        if (D <= 60 || spec.fairness_force_pairwise) {
            for (int d = 0; d < D; ++d)
                for (int d2 = 0; d2 < D; ++d2) {
                    if (d == d2) continue;
                    std::vector<std::pair<int, double>> row;
                    for (int k = 0; k < nT; ++k) {
                        row.push_back({v.s[d][k], 1.0});
                        row.push_back({v.s[d2][k], -1.0});
                    }
                    m.add_row(std::move(row), -kInf, cap);
                }
        } else if (D > 1) {
            // max/min reformulation, identical feasible region in s
            int smax = m.add_col(-kInf, kInf, 0.0, false);
            int smin = m.add_col(-kInf, kInf, 0.0, false);
            for (int d = 0; d < D; ++d) {
                std::vector<std::pair<int, double>> up{{smax, 1.0}}, dn{{smin, 1.0}};
                for (int k = 0; k < nT; ++k) {
                    up.push_back({v.s[d][k], -1.0});
                    dn.push_back({v.s[d][k], -1.0});
                }
                m.add_row(std::move(up), 0.0, kInf);
                m.add_row(std::move(dn), -kInf, 0.0);
            }
            m.add_row({{smax, 1.0}, {smin, -1.0}}, -kInf, cap);
        }
    }

    return v;
}

// ---------------------------------------------------------------------------
// stage models

namespace {

void add_value_terms(StageModel& sm, const ScenarioTree& tree) {
    for (const std::string& cid : tree.disruption_children(sm.owner)) {
        const DisruptionRealization& child = tree.node(cid);
        if (child.onset > tree.horizon_T)
            throw ValidationError("disruption child with onset beyond the horizon");
        sm.child_ids.push_back(cid);
        sm.child_probs.push_back(child.probability);
        sm.child_onsets.push_back(child.onset);
        sm.value_vars.push_back(sm.milp.add_col(0.0, kInf, child.probability, false));
    }
    sm.nominal_prob = tree.nominal_mass(sm.owner);
}

void attach_pool_cuts(StageModel& sm, const CutPool& pool) {
    for (size_t i = 0; i < sm.child_ids.size(); ++i)
        for (const CutRecord& cut : pool.for_node(sm.child_ids[i])) attach_cut(sm, cut);
}

}  // namespace

StageModel build_root(const PowerNetwork& net, const ScenarioTree& tree,
                      const FormulationOptions& options, const CutPool& pool) {
    if (options.beta < 0.0) throw ConfigError("beta must be >= 0");
    StageModel sm;
    sm.owner = tree.root_id;

    StageBlockSpec spec;
    spec.t_begin = 1;
    spec.restoration = options.restoration;
    spec.fairness = options.fairness_enabled;
    spec.beta = options.beta;
    spec.shed_weight_by_t = pre_disruption_weights(tree, tree.root_id, 1);
    sm.vars = add_stage_block(sm.milp, net, spec);

    add_value_terms(sm, tree);
    attach_pool_cuts(sm, pool);
    return sm;
}

StageModel build_node(const PowerNetwork& net, const ScenarioTree& tree, const std::string& node_id,
                      const CutPool& pool, const std::vector<double>& anchor) {
    const DisruptionRealization& node = tree.node(node_id);
    if (tree.is_nominal(node)) throw ValidationError("nominal realizations have no subproblem");
    const int C = net.component_count();
    if (static_cast<int>(anchor.size()) != C)
        throw InvalidParamsError("anchor dimension != component count");
    for (double a : anchor)
        if (std::abs(a) > 1e-6 && std::abs(a - 1.0) > 1e-6)
            throw InvalidParamsError("anchor entries must be binary");

    StageModel sm;
    sm.owner = node_id;
    sm.anchor = anchor;

    StageBlockSpec spec;
    spec.t_begin = node.onset;
    spec.with_copy = true;
    spec.with_damage = true;
    spec.realization = &node;
    spec.shed_weight_by_t = pre_disruption_weights(tree, node_id, node.onset);
    spec.damage_weight = 1.0;  // sibling probabilities sum to 1
    sm.vars = add_stage_block(sm.milp, net, spec);

    sm.copy_rows.resize(C, -1);
    for (int c = 0; c < C; ++c) {
        double a = std::round(anchor[c]);
        sm.copy_rows[c] = sm.milp.add_row({{sm.vars.zcopy[c], 1.0}}, a, a);
    }

    add_value_terms(sm, tree);
    attach_pool_cuts(sm, pool);
    return sm;
}

StageModel relax_binaries(StageModel model) {
    model.milp.relax_all_integrality();
    return model;
}

void attach_cut(StageModel& sm, const CutRecord& cut) {
    auto it = std::find(sm.child_ids.begin(), sm.child_ids.end(), cut.owner);
    if (it == sm.child_ids.end())
        throw DimensionMismatchError("cut owner " + cut.owner + " is not a child of " + sm.owner);
    size_t idx = static_cast<size_t>(it - sm.child_ids.begin());
    const int C = static_cast<int>(sm.vars.z.size());
    if (static_cast<int>(cut.slope.size()) != C || static_cast<int>(cut.anchor.size()) != C)
        throw DimensionMismatchError("cut dimension != component count");

    int anchor_t = sm.child_onsets[idx] - 1;
    if (anchor_t < sm.vars.t_begin || anchor_t > sm.vars.t_end)
        throw DimensionMismatchError("cut anchor period outside the stage");
    int k = anchor_t - sm.vars.t_begin;

    // V - lambda' z_{tau-1} >= v - lambda' zhat
    double rhs = cut.intercept;
    std::vector<std::pair<int, double>> row{{sm.value_vars[idx], 1.0}};
    for (int c = 0; c < C; ++c) {
        if (cut.slope[c] != 0.0) row.push_back({sm.vars.z[c][k], -cut.slope[c]});
        rhs -= cut.slope[c] * cut.anchor[c];
    }
    sm.milp.add_row(std::move(row), rhs, kInf);
    ++sm.cut_count;
}

std::vector<double> StageSolution::shutoff_state(int period) const {
    int k = period - t_begin;
    std::vector<double> out(z.size(), 0.0);
    for (size_t c = 0; c < z.size(); ++c) out[c] = std::round(z[c][k]);
    return out;
}

StageSolution extract_stage_values(const StageVars& vars, const std::vector<double>& primal) {
    StageSolution sol;
    sol.t_begin = vars.t_begin;
    sol.t_end = vars.t_end;
    auto pull2 = [&](const std::vector<std::vector<int>>& idx) {
        std::vector<std::vector<double>> out(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) {
            out[i].resize(idx[i].size());
            for (size_t k = 0; k < idx[i].size(); ++k) out[i][k] = primal[idx[i][k]];
        }
        return out;
    };
    sol.z = pull2(vars.z);
    sol.r = pull2(vars.r);
    sol.s = pull2(vars.s);
    sol.pg = pull2(vars.pg);
    sol.pl = pull2(vars.pl);
    sol.th = pull2(vars.th);
    sol.nu.resize(vars.nu.size());
    for (size_t c = 0; c < vars.nu.size(); ++c) sol.nu[c] = primal[vars.nu[c]];
    return sol;
}

StageSolution extract_solution(const StageModel& sm, const std::vector<double>& primal,
                               double objective) {
    StageSolution sol = extract_stage_values(sm.vars, primal);
    sol.objective = objective;
    double promised = 0.0;
    sol.value_estimates.resize(sm.value_vars.size());
    for (size_t i = 0; i < sm.value_vars.size(); ++i) {
        sol.value_estimates[i] = primal[sm.value_vars[i]];
        promised += sm.child_probs[i] * sol.value_estimates[i];
    }
    sol.immediate_cost = objective - promised;
    return sol;
}

}  // namespace wildgrid
