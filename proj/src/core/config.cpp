#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wildgrid {

using nlohmann::json;

namespace {

void parse_settings_json(const json& j, FormulationOptions& options, EngineConfig& engine) {
    if (j.contains("options")) {
        const json& o = j.at("options");
        options.beta = o.value("beta", options.beta);
        options.restoration = o.value("restoration", options.restoration);
        options.fairness_enabled = o.value("fairness_enabled", options.fairness_enabled);
    }
    if (j.contains("engine")) {
        const json& e = j.at("engine");
        engine.epsilon = e.value("epsilon", engine.epsilon);
        engine.delta = e.value("delta", engine.delta);
        engine.max_iterations = e.value("max_iterations", engine.max_iterations);
        engine.max_wall_time = e.value("max_wall_time", engine.max_wall_time);
        if (e.contains("cut_family"))
            engine.cut_family = cut_family_from_string(e.at("cut_family").get<std::string>());
        if (e.contains("z_domain"))
            engine.z_domain = z_domain_from_string(e.at("z_domain").get<std::string>());
        engine.dual.max_oracle_calls = e.value("max_oracle_calls", engine.dual.max_oracle_calls);
        engine.dual.tolerance = e.value("dual_tolerance", engine.dual.tolerance);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        engine.forward_mip_gap = s.value("forward_mip_gap", engine.forward_mip_gap);
        engine.backward_mip_gap = s.value("backward_mip_gap", engine.backward_mip_gap);
        engine.solver.mip_gap = engine.backward_mip_gap;
        engine.solver.time_limit = s.value("time_limit", engine.solver.time_limit);
        engine.solver.threads = s.value("threads", engine.solver.threads);
        engine.solver.seed = s.value("seed", engine.solver.seed);
    }
    if (engine.epsilon < 0.0) throw ConfigError("engine.epsilon must be >= 0");
    if (engine.delta < 0.0) throw ConfigError("engine.delta must be >= 0");
    if (options.beta < 0.0) throw ConfigError("options.beta must be >= 0");
}

RunConfig::GenerateSource parse_generate(const json& g) {
    RunConfig::GenerateSource gen;
    gen.ca = CaParams::from_json_text(g.at("ca").dump());
    gen.n = g.at("n").get<int>();
    gen.seed = g.at("seed").get<std::uint64_t>();
    gen.depth_limit = g.value("depth_limit", 2);
    gen.max_disruptions = g.value("max_disruptions", gen.depth_limit);
    if (gen.n < 1) throw ConfigError("scenario n must be >= 1");
    if (gen.depth_limit < 1) throw ConfigError("scenario depth_limit must be >= 1");
    return gen;
}

}  // namespace

void parse_settings_text(const std::string& text, FormulationOptions& options,
                         EngineConfig& engine) {
    if (text.empty()) return;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("settings JSON: ") + e.what());
    }
    try {
        parse_settings_json(j, options, engine);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("settings JSON: ") + e.what());
    }
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg.network_path = j.at("network").get<std::string>();
        const json& sc = j.at("scenario");
        if (sc.contains("generate") == sc.contains("load"))
            throw ConfigError("scenario must have exactly one source: generate or load");
        if (sc.contains("generate"))
            cfg.generate = parse_generate(sc.at("generate"));
        else
            cfg.tree_path = sc.at("load").get<std::string>();
        if (j.contains("test_scenario")) {
            const json& ts = j.at("test_scenario");
            if (ts.contains("generate") == ts.contains("load"))
                throw ConfigError("test_scenario must have exactly one source: generate or load");
            if (ts.contains("generate"))
                cfg.test_generate = parse_generate(ts.at("generate"));
            else
                cfg.test_tree_path = ts.at("load").get<std::string>();
        }
        parse_settings_json(j, cfg.options, cfg.engine);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        cfg.apply_default_costs = j.value("apply_default_costs", true);
        cfg.dump_models = j.value("dump_models", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
    json j;
    j["network"] = network_path;
    auto gen_json = [](const GenerateSource& g) {
        return json{{"ca", json::parse(g.ca.to_json_text())},
                    {"n", g.n},
                    {"seed", g.seed},
                    {"depth_limit", g.depth_limit},
                    {"max_disruptions", g.max_disruptions}};
    };
    if (generate)
        j["scenario"]["generate"] = gen_json(*generate);
    else if (tree_path)
        j["scenario"]["load"] = *tree_path;
    if (test_generate)
        j["test_scenario"]["generate"] = gen_json(*test_generate);
    else if (test_tree_path)
        j["test_scenario"]["load"] = *test_tree_path;
    j["options"] = {{"beta", options.beta},
                    {"restoration", options.restoration},
                    {"fairness_enabled", options.fairness_enabled}};
    j["engine"] = {{"epsilon", engine.epsilon},
                   {"delta", engine.delta},
                   {"cut_family", to_string(engine.cut_family)},
                   {"z_domain", to_string(engine.z_domain)},
                   {"max_iterations", engine.max_iterations},
                   {"max_wall_time", engine.max_wall_time},
                   {"max_oracle_calls", engine.dual.max_oracle_calls},
                   {"dual_tolerance", engine.dual.tolerance}};
    j["solver"] = {{"forward_mip_gap", engine.forward_mip_gap},
                   {"backward_mip_gap", engine.backward_mip_gap},
                   {"time_limit", engine.solver.time_limit},
                   {"threads", engine.solver.threads},
                   {"seed", engine.solver.seed}};
    j["output_dir"] = output_dir;
    j["apply_default_costs"] = apply_default_costs;
    j["dump_models"] = dump_models;
    return j.dump(2);
}

ScenarioTree RunConfig::make_tree(const PowerNetwork& net, int* n_paths) const {
    if (generate) {
        CaParams ca = generate->ca;
        ca.apply_default_layout(net);
        auto paths = simulate_paths(net, ca, generate->n, generate->seed,
                                    generate->max_disruptions);
        if (n_paths) *n_paths = static_cast<int>(paths.size());
        return build_tree(paths, net.horizon_T, generate->depth_limit);
    }
    if (n_paths) *n_paths = 0;
    return load_tree(*tree_path, net);
}

ScenarioTree RunConfig::make_test_tree(const PowerNetwork& net) const {
    if (test_generate) {
        CaParams ca = test_generate->ca;
        ca.apply_default_layout(net);
        auto paths = simulate_paths(net, ca, test_generate->n, test_generate->seed,
                                    test_generate->max_disruptions);
        return build_tree(paths, net.horizon_T, test_generate->depth_limit);
    }
    if (test_tree_path) return load_tree(*test_tree_path, net);
    if (generate) {
        // default testing set: same CA, fresh seed, at most one disruption
        CaParams ca = generate->ca;
        ca.apply_default_layout(net);
        auto paths = simulate_paths(net, ca, generate->n, generate->seed + 1, 1);
        return build_tree(paths, net.horizon_T, 1);
    }
    throw ConfigError("no testing scenario source: add test_scenario or pass a test tree");
}

void apply_overrides(RunConfig& config, const CliOverrides& overrides) {
    if (overrides.beta) {
        if (*overrides.beta < 0.0) throw ConfigError("beta must be >= 0");
        config.options.beta = *overrides.beta;
    }
    if (overrides.cut_family)
        config.engine.cut_family = cut_family_from_string(*overrides.cut_family);
    if (overrides.epsilon) {
        if (*overrides.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
        config.engine.epsilon = *overrides.epsilon;
    }
    if (overrides.seed) {
        config.engine.solver.seed = *overrides.seed;
        if (config.generate) config.generate->seed = static_cast<std::uint64_t>(*overrides.seed);
    }
    if (overrides.threads) config.engine.solver.threads = *overrides.threads;
    if (overrides.output_dir) config.output_dir = *overrides.output_dir;
}

}  // namespace wildgrid
