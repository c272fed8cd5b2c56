#include "wildgrid.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "evaluate.hpp"

using namespace wildgrid;
using nlohmann::json;

struct wg_network {
    PowerNetwork net;
};
struct wg_tree {
    ScenarioTree tree;
};
struct wg_plan {
    NominalPlan plan;
};
struct wg_report {
    SolveReport report;
};

namespace {

thread_local std::string g_last_error = "";

wg_status fail(wg_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// maps the core exception taxonomy onto status codes
wg_status guard(const std::function<void()>& body) {
    try {
        body();
        return WG_OK;
    } catch (const ParseError& e) {
        return fail(WG_EPARSE, e.what());
    } catch (const ConfigError& e) {
        return fail(WG_ECONFIG, e.what());
    } catch (const InvalidParamsError& e) {
        return fail(WG_ECONFIG, e.what());
    } catch (const EmptyInputError& e) {
        return fail(WG_ECONFIG, e.what());
    } catch (const InfeasiblePlanError& e) {
        return fail(WG_EINFEASIBLE, e.what());
    } catch (const SizeGuardError& e) {
        return fail(WG_ESIZE, e.what());
    } catch (const UnknownBusError& e) {
        return fail(WG_EVALIDATE, e.what());
    } catch (const ValidationError& e) {
        return fail(WG_EVALIDATE, e.what());
    } catch (const DimensionMismatchError& e) {
        return fail(WG_EVALIDATE, e.what());
    } catch (const CutGenerationError& e) {
        return fail(WG_EBACKEND, e.what());
    } catch (const BackendError& e) {
        return fail(WG_EBACKEND, e.what());
    } catch (const IoError& e) {
        return fail(WG_EIO, e.what());
    } catch (const std::exception& e) {
        return fail(WG_ERROR, e.what());
    }
}

FormulationOptions settings_options(const char* settings_json) {
    FormulationOptions options;
    EngineConfig engine;
    if (settings_json) parse_settings_text(settings_json, options, engine);
    return options;
}

EngineConfig settings_engine(const char* settings_json) {
    FormulationOptions options;
    EngineConfig engine;
    if (settings_json) parse_settings_text(settings_json, options, engine);
    return engine;
}

}  // namespace

extern "C" {

const char* wg_version(void) { return "0.1.0"; }

const char* wg_last_error(void) { return g_last_error.c_str(); }

/* --- network -------------------------------------------------------------- */

wg_status wg_network_load(const char* path, wg_network** out) {
    if (!path || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] { *out = new wg_network{load_network(path)}; });
}

wg_status wg_network_from_json(const char* json_text, wg_network** out) {
    if (!json_text || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] { *out = new wg_network{network_from_json_text(json_text)}; });
}

wg_status wg_network_default_costs(wg_network* net) {
    if (!net) return fail(WG_ECONFIG, "null network");
    return guard([&] { net->net = default_costs(std::move(net->net)); });
}

wg_status wg_network_counts(const wg_network* net, int* buses, int* generators, int* lines,
                            int* loads) {
    if (!net) return fail(WG_ECONFIG, "null network");
    if (buses) *buses = net->net.bus_count();
    if (generators) *generators = net->net.generator_count();
    if (lines) *lines = net->net.line_count();
    if (loads) *loads = net->net.load_count();
    return WG_OK;
}

int wg_network_horizon(const wg_network* net) { return net ? net->net.horizon_T : 0; }

void wg_network_free(wg_network* net) { delete net; }

/* --- trees ----------------------------------------------------------------- */

wg_status wg_tree_generate(const wg_network* net, const char* ca_json, int n, uint64_t seed,
                           int depth_limit, int max_disruptions, wg_tree** out) {
    if (!net || !ca_json || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] {
        CaParams params = CaParams::from_json_text(ca_json);
        auto paths = simulate_paths(net->net, params, n, seed, max_disruptions);
        *out = new wg_tree{build_tree(paths, net->net.horizon_T, depth_limit)};
    });
}

wg_status wg_tree_load(const char* path, const wg_network* net, wg_tree** out) {
    if (!path || !net || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] { *out = new wg_tree{load_tree(path, net->net)}; });
}

wg_status wg_tree_save(const wg_tree* tree, const wg_network* net, const char* path) {
    if (!tree || !net || !path) return fail(WG_ECONFIG, "null argument");
    return guard([&] { save_tree(tree->tree, net->net, path); });
}

int wg_tree_node_count(const wg_tree* tree) { return tree ? tree->tree.node_count() : 0; }

void wg_tree_free(wg_tree* tree) { delete tree; }

/* --- solving ---------------------------------------------------------------- */

wg_status wg_solve(const wg_network* net, const wg_tree* tree, const char* settings_json,
                   wg_report** out) {
    if (!net || !tree || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] {
        FormulationOptions options;
        EngineConfig engine;
        if (settings_json) parse_settings_text(settings_json, options, engine);
        *out = new wg_report{run(net->net, tree->tree, options, engine)};
    });
}

wg_status wg_report_bounds(const wg_report* report, double* lb, double* ub, double* gap) {
    if (!report) return fail(WG_ECONFIG, "null report");
    if (lb) *lb = report->report.lower_bound;
    if (ub) *ub = report->report.upper_bound;
    if (gap) *gap = report->report.gap;
    return WG_OK;
}

int wg_report_iterations(const wg_report* report) {
    return report ? static_cast<int>(report->report.trace.size()) : 0;
}

int wg_report_total_cuts(const wg_report* report) {
    return report ? report->report.total_cuts : 0;
}

const char* wg_report_reason(const wg_report* report) {
    static thread_local std::string reason;
    reason = report ? to_string(report->report.reason) : "";
    return reason.c_str();
}

wg_status wg_report_write_trace_csv(const wg_report* report, const char* path) {
    if (!report || !path) return fail(WG_ECONFIG, "null argument");
    return guard([&] { write_trace_csv(report->report, path); });
}

wg_status wg_report_get_plan(const wg_report* report, const wg_network* net, const wg_tree* tree,
                             const char* settings_json, wg_plan** out) {
    if (!report || !net || !tree || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] {
        *out = new wg_plan{
            plan_from_report(report->report, tree->tree, settings_options(settings_json))};
        check_plan((*out)->plan, net->net);
    });
}

void wg_report_free(wg_report* report) { delete report; }

/* --- plans and evaluation ----------------------------------------------------- */

wg_status wg_plan_load(const char* path, const wg_network* net, wg_plan** out) {
    if (!path || !net || !out) return fail(WG_ECONFIG, "null argument");
    return guard([&] { *out = new wg_plan{load_plan(path, net->net)}; });
}

wg_status wg_plan_save(const wg_plan* plan, const wg_network* net, const char* path) {
    if (!plan || !net || !path) return fail(WG_ECONFIG, "null argument");
    return guard([&] { save_plan(plan->plan, net->net, path); });
}

wg_status wg_plan_fairness(const wg_plan* plan, const wg_network* net, double* max_pairwise_gap,
                           double* total_shed_fraction) {
    if (!plan || !net) return fail(WG_ECONFIG, "null argument");
    return guard([&] {
        FairnessMetrics fm = fairness_metrics(plan->plan, net->net);
        if (max_pairwise_gap) *max_pairwise_gap = fm.max_pairwise_gap;
        if (total_shed_fraction) *total_shed_fraction = fm.total_shed_fraction;
    });
}

void wg_plan_free(wg_plan* plan) { delete plan; }

wg_status wg_evaluate(const wg_plan* plan, const wg_network* net, const wg_tree* testing,
                      const char* settings_json, double* nominal_shed, double* disruptive_shed,
                      double* damage, double* total, int* scenarios) {
    if (!plan || !net || !testing) return fail(WG_ECONFIG, "null argument");
    return guard([&] {
        EngineConfig engine = settings_engine(settings_json);
        EvaluationBreakdown b =
            evaluate_out_of_sample(plan->plan, net->net, testing->tree, engine.solver);
        if (nominal_shed) *nominal_shed = b.nominal_shed_cost;
        if (disruptive_shed) *disruptive_shed = b.disruptive_shed_cost;
        if (damage) *damage = b.damage_cost;
        if (total) *total = b.total;
        if (scenarios) *scenarios = b.scenario_count;
    });
}

wg_status wg_compare(const wg_network* net, const wg_tree* training, const wg_tree* testing,
                     const double* betas, int n_betas, const char* settings_json,
                     const char* csv_path) {
    if (!net || !training || !testing || !csv_path) return fail(WG_ECONFIG, "null argument");
    if (!betas || n_betas < 1) return fail(WG_ECONFIG, "empty beta list");
    return guard([&] {
        FormulationOptions options;
        EngineConfig engine;
        if (settings_json) parse_settings_text(settings_json, options, engine);
        std::vector<double> beta_list(betas, betas + n_betas);
        auto rows = compare_restoration(net->net, training->tree, testing->tree, beta_list,
                                        options, engine);
        write_comparison_csv(csv_path, rows);
    });
}

/* --- orchestration -------------------------------------------------------------- */

wg_status wg_run_command(const char* command, const char* config_path,
                         const char* overrides_json) {
    if (!command || !config_path) return fail(WG_ECONFIG, "null argument");
    return guard([&] {
        RunConfig cfg = RunConfig::load(config_path);

        std::string plan_path, test_tree_path;
        std::vector<double> betas;
        if (overrides_json && std::strlen(overrides_json) > 0) {
            json ov;
            try {
                ov = json::parse(overrides_json);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("overrides JSON: ") + e.what());
            }
            CliOverrides o;
            if (ov.contains("beta")) o.beta = ov.at("beta").get<double>();
            if (ov.contains("cut_family")) o.cut_family = ov.at("cut_family").get<std::string>();
            if (ov.contains("epsilon")) o.epsilon = ov.at("epsilon").get<double>();
            if (ov.contains("seed")) o.seed = ov.at("seed").get<long>();
            if (ov.contains("threads")) o.threads = ov.at("threads").get<int>();
            if (ov.contains("output")) o.output_dir = ov.at("output").get<std::string>();
            apply_overrides(cfg, o);
            plan_path = ov.value("plan", "");
            test_tree_path = ov.value("test_tree", "");
            if (ov.contains("betas")) betas = ov.at("betas").get<std::vector<double>>();
        }

        PowerNetwork net = load_network(cfg.network_path);
        if (cfg.apply_default_costs) net = default_costs(std::move(net));
        std::filesystem::create_directories(cfg.output_dir);
        std::string cmd(command);

        if (cmd == "generate") {
            if (!cfg.generate) throw ConfigError("generate needs a scenario.generate source");
            int n_paths = 0;
            ScenarioTree tree = cfg.make_tree(net, &n_paths);
            save_tree(tree, net, cfg.output_dir + "/tree.json");
            json stats{{"paths", n_paths},
                       {"nodes", tree.node_count()},
                       {"depth_limit", tree.depth_limit},
                       {"root_children", tree.root().children.size()},
                       {"seed", cfg.generate->seed}};
            std::ofstream out(cfg.output_dir + "/generate_summary.json");
            if (!out) throw IoError("cannot write generate_summary.json");
            out << stats.dump(2) << "\n";
            return;
        }

        if (cmd == "solve") {
            ScenarioTree tree = cfg.make_tree(net);
            cfg.engine.trace_csv = cfg.output_dir + "/convergence.csv";
            cfg.engine.cut_log_json = cfg.output_dir + "/cuts.json";
            if (cfg.dump_models) cfg.engine.lp_dump_dir = cfg.output_dir + "/models";
            SolveReport report = run(net, tree, cfg.options, cfg.engine);
            save_tree(tree, net, cfg.output_dir + "/tree.json");
            NominalPlan plan = plan_from_report(report, tree, cfg.options);
            save_plan(plan, net, cfg.output_dir + "/plan.json");
            FairnessMetrics fm = fairness_metrics(plan, net);
            std::vector<FairnessRow> frows;
            for (int d = 0; d < net.load_count(); ++d)
                frows.push_back({cfg.options.beta, net.loads[d].id, fm.per_load_cum_shed[d]});
            emit_reports(cfg.output_dir, report, nullptr, &frows, nullptr, cfg.to_json_text());
            return;
        }

        if (cmd == "evaluate") {
            if (plan_path.empty()) plan_path = cfg.output_dir + "/plan.json";
            NominalPlan plan = load_plan(plan_path, net);
            ScenarioTree testing = test_tree_path.empty() ? cfg.make_test_tree(net)
                                                          : load_tree(test_tree_path, net);
            EvaluationBreakdown b =
                evaluate_out_of_sample(plan, net, testing, cfg.engine.solver);
            write_breakdown_csv(cfg.output_dir + "/breakdown.csv", b);
            json summary{{"nominal_shed", b.nominal_shed_cost},
                         {"disruptive_shed", b.disruptive_shed_cost},
                         {"damage", b.damage_cost},
                         {"total", b.total},
                         {"scenarios", b.scenario_count},
                         {"plan", plan_path}};
            std::ofstream out(cfg.output_dir + "/evaluate_summary.json");
            if (!out) throw IoError("cannot write evaluate_summary.json");
            out << summary.dump(2) << "\n";
            return;
        }

        if (cmd == "compare") {
            if (betas.empty()) throw ConfigError("compare needs a nonempty beta list");
            ScenarioTree tree = cfg.make_tree(net);
            ScenarioTree testing = test_tree_path.empty() ? cfg.make_test_tree(net)
                                                          : load_tree(test_tree_path, net);
            auto rows =
                compare_restoration(net, tree, testing, betas, cfg.options, cfg.engine);
            write_comparison_csv(cfg.output_dir + "/comparison.csv", rows);
            return;
        }

        throw ConfigError("unknown command: " + cmd);
    });
}

}  // extern "C"
