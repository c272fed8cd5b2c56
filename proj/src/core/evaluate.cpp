#include "evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace wildgrid {

using nlohmann::json;

// ---------------------------------------------------------------------------
// nominal plan

NominalPlan plan_from_report(const SolveReport& report, const ScenarioTree& tree,
                             const FormulationOptions& options) {
    auto it = report.incumbent.find(tree.root_id);
    if (it == report.incumbent.end())
        throw EmptyInputError("solve report carries no incumbent root solution");
    return NominalPlan{options, it->second};
}

namespace {

json series_map(const std::vector<std::vector<double>>& values,
                const std::function<std::string(int)>& name, bool round_binary) {
    json out = json::object();
    for (size_t i = 0; i < values.size(); ++i) {
        json arr = json::array();
        for (double v : values[i]) arr.push_back(round_binary ? std::round(v) : v);
        out[name(static_cast<int>(i))] = arr;
    }
    return out;
}

std::vector<std::vector<double>> series_from_map(const json& j, int count, int T,
                                                 const std::function<std::string(int)>& name) {
    std::vector<std::vector<double>> out(count, std::vector<double>(T, 0.0));
    for (int i = 0; i < count; ++i) {
        const json& arr = j.at(name(i));
        if (static_cast<int>(arr.size()) != T)
            throw ParseError("plan series " + name(i) + " has wrong length");
        for (int t = 0; t < T; ++t) out[i][t] = arr[t].get<double>();
    }
    return out;
}

ScenarioTree nominal_only_tree(int horizon_T) {
    ScenarioTree tree;
    tree.horizon_T = horizon_T;
    tree.depth_limit = 1;
    DisruptionRealization root;
    root.id = tree.root_id;
    root.onset = 1;
    root.children = {"n1"};
    DisruptionRealization nominal;
    nominal.id = "n1";
    nominal.parent = tree.root_id;
    nominal.onset = horizon_T + 1;
    nominal.probability = 1.0;
    tree.nodes.emplace(root.id, std::move(root));
    tree.nodes.emplace("n1", std::move(nominal));
    return tree;
}

}  // namespace

std::string plan_to_json_text(const NominalPlan& plan, const PowerNetwork& net) {
    json j;
    j["options"] = {{"beta", plan.options.beta},
                    {"restoration", plan.options.restoration},
                    {"fairness_enabled", plan.options.fairness_enabled}};
    j["horizon_T"] = net.horizon_T;
    auto comp = [&](int c) { return net.component_id(c); };
    auto load = [&](int d) { return net.loads[d].id; };
    auto gen = [&](int g) { return net.generators[g].id; };
    auto line = [&](int l) { return net.lines[l].id; };
    auto bus = [&](int b) { return net.buses[b].id; };
    j["z"] = series_map(plan.root.z, comp, true);
    if (!plan.root.r.empty()) j["r"] = series_map(plan.root.r, comp, true);
    j["s"] = series_map(plan.root.s, load, false);
    j["pg"] = series_map(plan.root.pg, gen, false);
    j["pl"] = series_map(plan.root.pl, line, false);
    j["theta"] = series_map(plan.root.th, bus, false);
    return j.dump(2);
}

NominalPlan plan_from_json_text(const std::string& text, const PowerNetwork& net) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan JSON: ") + e.what());
    }
    NominalPlan plan;
    try {
        plan.options.beta = j.at("options").at("beta").get<double>();
        plan.options.restoration = j.at("options").at("restoration").get<bool>();
        plan.options.fairness_enabled = j.at("options").at("fairness_enabled").get<bool>();
        if (j.at("horizon_T").get<int>() != net.horizon_T)
            throw ParseError("plan horizon does not match the network");
        int T = net.horizon_T;
        plan.root.t_begin = 1;
        plan.root.t_end = T;
        auto comp = [&](int c) { return net.component_id(c); };
        auto load = [&](int d) { return net.loads[d].id; };
        auto gen = [&](int g) { return net.generators[g].id; };
        auto line = [&](int l) { return net.lines[l].id; };
        auto bus = [&](int b) { return net.buses[b].id; };
        plan.root.z = series_from_map(j.at("z"), net.component_count(), T, comp);
        if (plan.options.restoration)
            plan.root.r = series_from_map(j.at("r"), net.component_count(), T, comp);
        plan.root.s = series_from_map(j.at("s"), net.load_count(), T, load);
        plan.root.pg = series_from_map(j.at("pg"), net.generator_count(), T, gen);
        plan.root.pl = series_from_map(j.at("pl"), net.line_count(), T, line);
        plan.root.th = series_from_map(j.at("theta"), net.bus_count(), T, bus);
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan JSON: ") + e.what());
    }
    check_plan(plan, net);
    return plan;
}

void save_plan(const NominalPlan& plan, const PowerNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write plan file: " + path);
    out << plan_to_json_text(plan, net) << "\n";
}

NominalPlan load_plan(const std::string& path, const PowerNetwork& net) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plan file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return plan_from_json_text(ss.str(), net);
}

void check_plan(const NominalPlan& plan, const PowerNetwork& net, double tol) {
    // rebuild the first-stage constraint set and evaluate the plan point
    MilpModel m;
    StageBlockSpec spec;
    spec.t_begin = 1;
    spec.restoration = plan.options.restoration;
    spec.fairness = plan.options.fairness_enabled;
    spec.fairness_force_pairwise = true;
    spec.beta = plan.options.beta;
    spec.shed_weight_by_t.assign(net.horizon_T, 1.0);
    StageVars vars = add_stage_block(m, net, spec);

    std::vector<double> x(m.num_cols(), 0.0);
    auto place2 = [&](const std::vector<std::vector<int>>& idx,
                      const std::vector<std::vector<double>>& val, const char* what) {
        if (idx.size() != val.size())
            throw InfeasiblePlanError(std::string("plan is missing the ") + what + " series");
        for (size_t i = 0; i < idx.size(); ++i)
            for (size_t k = 0; k < idx[i].size(); ++k) x[idx[i][k]] = val[i][k];
    };
    place2(vars.z, plan.root.z, "z");
    if (plan.options.restoration) place2(vars.r, plan.root.r, "r");
    place2(vars.s, plan.root.s, "s");
    place2(vars.pg, plan.root.pg, "pg");
    place2(vars.pl, plan.root.pl, "pl");
    place2(vars.th, plan.root.th, "theta");

    double viol = m.max_violation(x);
    if (viol > tol)
        throw InfeasiblePlanError("plan violates the first-stage constraints by " +
                                  std::to_string(viol));
}

// ---------------------------------------------------------------------------
// extensive form

namespace {

struct ComposedBlock {
    std::string id;
    StageVars vars;
    double rel_prob;  // probability relative to the composed root
};

int subtree_node_count(const ScenarioTree& tree, const std::string& id) {
    int n = 1;
    for (const std::string& c : tree.node(id).children) n += subtree_node_count(tree, c);
    return n;
}

void compose_subtree(MilpModel& m, const PowerNetwork& net, const ScenarioTree& tree,
                     const std::string& node_id, double rel_prob, bool as_root,
                     const FormulationOptions& options, const StageVars* parent_vars,
                     const std::vector<double>* anchor, std::vector<ComposedBlock>& out) {
    const DisruptionRealization& node = tree.node(node_id);
    StageBlockSpec spec;
    spec.t_begin = as_root ? 1 : node.onset;
    spec.restoration = as_root && options.restoration;
    spec.fairness = as_root && options.fairness_enabled;
    spec.beta = options.beta;
    spec.with_copy = !as_root;
    spec.with_damage = !as_root;
    spec.realization = as_root ? nullptr : &node;
    spec.shed_weight_by_t = pre_disruption_weights(tree, node_id, spec.t_begin);
    for (double& w : spec.shed_weight_by_t) w *= rel_prob;
    spec.damage_weight = rel_prob;
    StageVars vars = add_stage_block(m, net, spec);

    if (!as_root) {
        const int C = net.component_count();
        if (anchor) {
            for (int c = 0; c < C; ++c) {
                double a = std::round((*anchor)[c]);
                m.add_row({{vars.zcopy[c], 1.0}}, a, a);
            }
        } else {
            int k = node.onset - 1 - parent_vars->t_begin;
            for (int c = 0; c < C; ++c)
                m.add_row({{vars.zcopy[c], 1.0}, {parent_vars->z[c][k], -1.0}}, 0.0, 0.0);
        }
    }
    out.push_back({node_id, vars, rel_prob});
    const StageVars& own = out.back().vars;
    for (const std::string& cid : tree.disruption_children(node_id))
        compose_subtree(m, net, tree, cid, rel_prob * tree.node(cid).probability, false, options,
                        &own, nullptr, out);
}

void guard_size(const PowerNetwork& net, const ScenarioTree& tree, const std::string& root) {
    if (subtree_node_count(tree, root) > 50)
        throw SizeGuardError("extensive form refused: more than 50 tree nodes");
    if (net.component_count() > 60)
        throw SizeGuardError("extensive form refused: more than 60 components");
}

}  // namespace

ExtensiveSolution extensive_form_solve(const PowerNetwork& net, const ScenarioTree& tree,
                                       const FormulationOptions& options,
                                       const SolverParams& params) {
    tree.validate(&net);
    guard_size(net, tree, tree.root_id);
    MilpModel m;
    std::vector<ComposedBlock> blocks;
    compose_subtree(m, net, tree, tree.root_id, 1.0, true, options, nullptr, nullptr, blocks);
    SolveOutcome out = MilpBackend::instance().solve_mip(m, params);
    if (!out.feasible()) throw BackendError("extensive form returned no solution");
    ExtensiveSolution sol;
    sol.value = out.objective;
    for (const ComposedBlock& b : blocks)
        sol.by_node.emplace(b.id, extract_stage_values(b.vars, out.primal));
    return sol;
}

double node_value_exact(const PowerNetwork& net, const ScenarioTree& tree,
                        const std::string& node_id, const std::vector<double>& anchor,
                        const SolverParams& params,
                        std::map<std::string, StageSolution>* solutions) {
    const DisruptionRealization& node = tree.node(node_id);
    if (tree.is_nominal(node)) return 0.0;
    guard_size(net, tree, node_id);
    if (static_cast<int>(anchor.size()) != net.component_count())
        throw InvalidParamsError("anchor dimension != component count");
    MilpModel m;
    std::vector<ComposedBlock> blocks;
    FormulationOptions options;  // restoration/fairness never apply below the root
    options.restoration = false;
    options.fairness_enabled = false;
    compose_subtree(m, net, tree, node_id, 1.0, false, options, nullptr, &anchor, blocks);
    SolveOutcome out = MilpBackend::instance().solve_mip(m, params);
    if (!out.feasible())
        throw BackendError("node subtree solve returned no solution for " + node_id);
    if (solutions)
        for (const ComposedBlock& b : blocks)
            solutions->emplace(b.id, extract_stage_values(b.vars, out.primal));
    return out.objective;
}

// ---------------------------------------------------------------------------
// out-of-sample evaluation

namespace {

double stage_shed_cost(const PowerNetwork& net, const ScenarioTree& tree, const std::string& id,
                       const StageSolution& sol) {
    std::vector<double> w = pre_disruption_weights(tree, id, sol.t_begin);
    double cost = 0.0;
    for (int d = 0; d < net.load_count(); ++d)
        for (int k = 0; k < sol.t_end - sol.t_begin + 1; ++k)
            cost += net.loads[d].priority * w[k] * sol.s[d][k];
    return cost;
}

double stage_damage_cost(const PowerNetwork& net, const StageSolution& sol) {
    double cost = 0.0;
    for (size_t c = 0; c < sol.nu.size(); ++c)
        cost += net.component_damage_cost(static_cast<int>(c)) * std::round(sol.nu[c]);
    return cost;
}

}  // namespace

EvaluationBreakdown evaluate_out_of_sample(const NominalPlan& plan, const PowerNetwork& net,
                                           const ScenarioTree& testing,
                                           const SolverParams& params) {
    testing.validate(&net);
    if (testing.root().children.empty())
        throw EmptyInputError("testing set has no scenarios");
    check_plan(plan, net);

    EvaluationBreakdown b;
    // shed_prefix[tau] = plan shed cost over t = 1..tau-1
    std::vector<double> shed_prefix(net.horizon_T + 2, 0.0);
    for (int t = 1; t <= net.horizon_T; ++t) {
        double at = 0.0;
        for (int d = 0; d < net.load_count(); ++d)
            at += net.loads[d].priority * plan.root.s[d][t - 1];
        shed_prefix[t + 1] = shed_prefix[t] + at;
    }

    double nominal_mass = testing.nominal_mass(testing.root_id);
    if (nominal_mass > 0.0) {
        b.nominal_shed_cost += nominal_mass * shed_prefix[net.horizon_T + 1];
        b.scenario_count += 1;
    }
    for (const std::string& cid : testing.disruption_children(testing.root_id)) {
        const DisruptionRealization& node = testing.node(cid);
        double p = node.probability;
        b.nominal_shed_cost += p * shed_prefix[node.onset];
        std::vector<double> anchor = plan.root.shutoff_state(node.onset - 1);
        std::map<std::string, StageSolution> sols;
        double f = node_value_exact(net, testing, cid, anchor, params, &sols);
        double shed = 0.0, damage = 0.0;
        for (const auto& [id, sol] : sols) {
            double rel = testing.path_probability(id) / testing.path_probability(cid);
            shed += rel * stage_shed_cost(net, testing, id, sol);
            damage += rel * stage_damage_cost(net, sol);
        }
        if (std::abs(f - shed - damage) > 1e-6 * std::max(1.0, std::abs(f)))
            throw BackendError("recourse breakdown does not recombine to the subproblem value");
        b.disruptive_shed_cost += p * shed;
        b.damage_cost += p * damage;
        b.scenario_count += 1;
    }
    b.total = b.nominal_shed_cost + b.disruptive_shed_cost + b.damage_cost;
    return b;
}

FairnessMetrics fairness_metrics(const NominalPlan& plan, const PowerNetwork& net) {
    FairnessMetrics fm;
    int D = net.load_count();
    int T = net.horizon_T;
    fm.per_load_cum_shed.resize(D, 0.0);
    double max_cum = -kInf, min_cum = kInf;
    double total_shed = 0.0, total_demand = 0.0;
    for (int d = 0; d < D; ++d) {
        double cum = 0.0;
        for (int t = 0; t < T; ++t) {
            cum += plan.root.s[d][t];
            total_shed += net.loads[d].demand_by_period[t] * plan.root.s[d][t];
            total_demand += net.loads[d].demand_by_period[t];
        }
        fm.per_load_cum_shed[d] = cum / static_cast<double>(T);
        max_cum = std::max(max_cum, cum);
        min_cum = std::min(min_cum, cum);
    }
    fm.max_pairwise_gap = (D >= 2) ? (max_cum - min_cum) : 0.0;
    fm.total_shed_fraction = total_demand > 0.0 ? total_shed / total_demand : 0.0;
    return fm;
}

std::vector<ComparisonRow> compare_restoration(const PowerNetwork& net, const ScenarioTree& tree,
                                               const ScenarioTree& testing,
                                               const std::vector<double>& betas,
                                               const FormulationOptions& base_options,
                                               const EngineConfig& config) {
    if (betas.empty()) throw ConfigError("compare_restoration: empty beta list");
    std::vector<ComparisonRow> rows;
    for (bool restoration : {true, false}) {
        for (double beta : betas) {
            FormulationOptions options = base_options;
            options.beta = beta;
            options.restoration = restoration;
            SolveReport report = run(net, tree, options, config);
            NominalPlan plan = plan_from_report(report, tree, options);
            EvaluationBreakdown b = evaluate_out_of_sample(plan, net, testing, config.solver);
            ComparisonRow row;
            row.restoration = restoration;
            row.beta = beta;
            row.nominal_shed = b.nominal_shed_cost;
            row.disruptive_shed = b.disruptive_shed_cost;
            row.damage = b.damage_cost;
            row.total = b.total;
            row.root_objective = report.upper_bound;
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// artifacts

void write_fairness_csv(const std::string& path, const std::vector<FairnessRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write fairness CSV: " + path);
    out << "beta,load_id,cum_shed_frac\n";
    out.precision(12);
    for (const FairnessRow& r : rows)
        out << r.beta << "," << r.load_id << "," << r.cum_shed_frac << "\n";
}

void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write comparison CSV: " + path);
    out << "restoration,beta,nominal_shed,disruptive_shed,damage,total\n";
    out.precision(12);
    for (const ComparisonRow& r : rows)
        out << (r.restoration ? 1 : 0) << "," << r.beta << "," << r.nominal_shed << ","
            << r.disruptive_shed << "," << r.damage << "," << r.total << "\n";
}

void write_breakdown_csv(const std::string& path, const EvaluationBreakdown& b) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write breakdown CSV: " + path);
    out << "nominal_shed,disruptive_shed,damage,total,scenarios\n";
    out.precision(12);
    out << b.nominal_shed_cost << "," << b.disruptive_shed_cost << "," << b.damage_cost << ","
        << b.total << "," << b.scenario_count << "\n";
}

void emit_reports(const std::string& out_dir, const SolveReport& report,
                  const EvaluationBreakdown* breakdown, const std::vector<FairnessRow>* fairness,
                  const std::vector<ComparisonRow>* comparison, const std::string& config_echo) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    write_trace_csv(report, out_dir + "/convergence.csv");
    if (breakdown) write_breakdown_csv(out_dir + "/breakdown.csv", *breakdown);
    if (fairness) write_fairness_csv(out_dir + "/fairness.csv", *fairness);
    if (comparison) write_comparison_csv(out_dir + "/comparison.csv", *comparison);

    json summary;
    summary["lower_bound"] = report.lower_bound;
    summary["upper_bound"] = report.upper_bound;
    summary["gap"] = report.gap;
    summary["reason"] = to_string(report.reason);
    summary["iterations"] = report.trace.size();
    summary["total_cuts"] = report.total_cuts;
    summary["wall_time"] = report.wall_time;
    summary["lb_monotone"] = lower_bound_is_monotone(report);
    if (breakdown) {
        summary["evaluation"] = {{"nominal_shed", breakdown->nominal_shed_cost},
                                 {"disruptive_shed", breakdown->disruptive_shed_cost},
                                 {"damage", breakdown->damage_cost},
                                 {"total", breakdown->total},
                                 {"scenarios", breakdown->scenario_count}};
    }
    if (!config_echo.empty()) {
        try {
            summary["config"] = json::parse(config_echo);
        } catch (const json::exception&) {
            summary["config"] = config_echo;
        }
    }
    std::ofstream out(out_dir + "/summary.json");
    if (!out) throw IoError("cannot write summary.json");
    out << summary.dump(2) << "\n";
}

}  // namespace wildgrid
