#include "engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace wildgrid {

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Converged: return "Converged";
        case StopReason::GapStall: return "GapStall";
        case StopReason::IterationLimit: return "IterationLimit";
        case StopReason::TimeLimit: return "TimeLimit";
    }
    return "IterationLimit";
}

DecompositionEngine::DecompositionEngine(const PowerNetwork& net, const ScenarioTree& tree,
                                         const FormulationOptions& options,
                                         const EngineConfig& config)
    : net_(net), tree_(tree), options_(options), config_(config) {
    tree.validate(&net);
}

StageSolution DecompositionEngine::solve_stage(const StageModel& model,
                                               const SolverParams& params) const {
    SolveOutcome out = MilpBackend::instance().solve_mip(model.milp, params);
    if (out.status == SolveStatus::Infeasible)
        throw BackendError("stage problem for " + model.owner +
                           " reported infeasible; relatively complete recourse violated");
    if (!out.feasible())
        throw BackendError("stage problem for " + model.owner + " returned no solution");
    StageSolution sol = extract_solution(model, out.primal, out.objective);
    return sol;
}

DecompositionEngine::ForwardResult DecompositionEngine::forward_pass() {
    ForwardResult fw;
    StageModel root = build_root(net_, tree_, options_, pool_);
    SolveOutcome root_out = MilpBackend::instance().solve_mip(root.milp, config_.forward_params());
    if (!root_out.feasible()) throw BackendError("root problem returned no solution");
    StageSolution root_sol = extract_solution(root, root_out.primal, root_out.objective);
    fw.lb_candidate = root_out.dual_bound;
    fw.ub_candidate = root_sol.immediate_cost;

    // depth-first, sibling order as stored; anchors flow from parent solutions
    std::vector<std::string> stack(tree_.disruption_children(tree_.root_id));
    std::reverse(stack.begin(), stack.end());
    fw.solutions.emplace(tree_.root_id, std::move(root_sol));
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        const DisruptionRealization& node = tree_.node(id);
        const StageSolution& parent_sol = fw.solutions.at(node.parent);
        std::vector<double> anchor = parent_sol.shutoff_state(node.onset - 1);
        StageModel sub = build_node(net_, tree_, id, pool_, anchor);
        StageSolution sol = solve_stage(sub, config_.forward_params());
        fw.ub_candidate += tree_.path_probability(id) * sol.immediate_cost;
        fw.solutions.emplace(id, std::move(sol));
        auto kids = tree_.disruption_children(id);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return fw;
}

CutRecord DecompositionEngine::make_cut(const StageModel& sub) const {
    switch (config_.cut_family) {
        case CutFamily::BC: return benders_cut(sub, config_.backward_params());
        case CutFamily::SBC:
            return strengthened_benders_cut(sub, config_.z_domain, config_.backward_params());
        case CutFamily::LC:
            return lagrangian_cut(sub, config_.z_domain, config_.dual, config_.backward_params());
        case CutFamily::SMC:
            return square_min_cut(sub, config_.delta, config_.z_domain, config_.dual,
                                  config_.backward_params());
    }
    throw ConfigError("unknown cut family");
}

int DecompositionEngine::backward_pass(const ForwardResult& fw, int iteration) {
    int added = 0;
    for (const std::string& id : tree_.nodes_by_depth_desc()) {
        const DisruptionRealization& node = tree_.node(id);
        const StageSolution& parent_sol = fw.solutions.at(node.parent);
        std::vector<double> anchor = parent_sol.shutoff_state(node.onset - 1);
        StageModel sub = build_node(net_, tree_, id, pool_, anchor);
        if (!config_.lp_dump_dir.empty()) dump_model(sub, iteration);
        CutRecord cut = make_cut(sub);
        cut.iteration = iteration;
        if (pool_.add(std::move(cut))) ++added;
    }
    return added;
}

SolveReport DecompositionEngine::run() {
    SolveReport report;
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    double lb = 0.0, ub = kInf;
    int flat_lb_iterations = 0;
    bool done = false;
    for (int iter = 1; !done; ++iter) {
        ForwardResult fw = forward_pass();
        double prev_lb = lb;
        lb = std::max(lb, fw.lb_candidate);
        if (fw.ub_candidate < ub) {
            ub = fw.ub_candidate;
            report.incumbent = fw.solutions;
        }
        double gap = (ub - lb) / std::max(std::abs(ub), 1e-10);
        if (ub == 0.0 && lb >= -1e-10) gap = 0.0;

        int cuts_added = 0;
        StopReason reason = StopReason::Converged;
        if (gap <= config_.epsilon + 1e-9) {
            done = true;
        } else if (elapsed() >= config_.max_wall_time) {
            done = true;
            reason = StopReason::TimeLimit;
        } else if (iter >= config_.max_iterations) {
            done = true;
            reason = StopReason::IterationLimit;
        } else {
            bool stall_prone =
                config_.cut_family == CutFamily::BC || config_.cut_family == CutFamily::SBC;
            if (iter > 1 && lb - prev_lb < config_.stall_improvement)
                ++flat_lb_iterations;
            else
                flat_lb_iterations = 0;
            if (stall_prone && flat_lb_iterations >= config_.stall_iterations) {
                done = true;
                reason = StopReason::GapStall;
            } else {
                cuts_added = backward_pass(fw, iter);
            }
        }

        report.trace.push_back({iter, lb, ub, gap, cuts_added, elapsed()});
        if (done) report.reason = reason;
    }

    report.lower_bound = lb;
    report.upper_bound = ub;
    report.gap = report.trace.back().gap;
    report.total_cuts = pool_.total();
    report.wall_time = elapsed();
    report.pool = pool_;

    if (!config_.trace_csv.empty()) write_trace_csv(report, config_.trace_csv);
    if (!config_.cut_log_json.empty()) write_cut_log_json(report, config_.cut_log_json);
    return report;
}

void DecompositionEngine::dump_model(const StageModel& model, int iteration) const {
    std::filesystem::create_directories(config_.lp_dump_dir);
    std::string path = config_.lp_dump_dir + "/iter" + std::to_string(iteration) + "_" +
                       model.owner + ".lp";
    std::ofstream out(path);
    if (out) out << model.milp.to_lp_text();
}

SolveReport run(const PowerNetwork& net, const ScenarioTree& tree,
                const FormulationOptions& options, const EngineConfig& config) {
    DecompositionEngine engine(net, tree, options, config);
    return engine.run();
}

bool lower_bound_is_monotone(const SolveReport& report) {
    for (size_t i = 1; i < report.trace.size(); ++i)
        if (report.trace[i].lb < report.trace[i - 1].lb - 1e-9) return false;
    return true;
}

void write_trace_csv(const SolveReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace CSV: " + path);
    out << "iter,lb,ub,gap,cuts_added,seconds\n";
    out.precision(12);
    for (const IterationRecord& r : report.trace)
        out << r.iter << "," << r.lb << "," << r.ub << "," << r.gap << "," << r.cuts_added << ","
            << r.seconds << "\n";
}

void write_cut_log_json(const SolveReport& report, const std::string& path) {
    nlohmann::json cuts = nlohmann::json::array();
    for (const auto& [owner, list] : report.pool.by_owner()) {
        for (const CutRecord& c : list) {
            cuts.push_back({{"owner", owner},
                            {"family", to_string(c.family)},
                            {"z_domain", to_string(c.z_domain)},
                            {"iteration", c.iteration},
                            {"slope", c.slope},
                            {"intercept", c.intercept},
                            {"anchor", c.anchor},
                            {"tight", c.tight},
                            {"oracle_calls", c.oracle_calls},
                            {"wall_time", c.wall_time}});
        }
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write cut log: " + path);
    out << cuts.dump(2) << "\n";
}

}  // namespace wildgrid
