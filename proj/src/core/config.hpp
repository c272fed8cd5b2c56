#pragma once

#include <optional>
#include <string>

#include "engine.hpp"
#include "scenario.hpp"

namespace wildgrid {

// One experiment description: network, scenario source, formulation options,
// engine and solver settings, output directory. Parsed from a JSON file with
// flag overrides applied on top.
struct RunConfig {
    std::string network_path;

    // exactly one scenario source
    struct GenerateSource {
        CaParams ca;
        int n = 500;
        std::uint64_t seed = 42;
        int depth_limit = 2;
        int max_disruptions = 2;
    };
    std::optional<GenerateSource> generate;
    std::optional<std::string> tree_path;

    // optional out-of-sample source; when absent and `generate` is set, a
    // depth-1 testing set is derived from it (seed+1)
    std::optional<GenerateSource> test_generate;
    std::optional<std::string> test_tree_path;

    FormulationOptions options;
    EngineConfig engine;
    std::string output_dir = "out";
    bool apply_default_costs = true;
    bool dump_models = false;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig load(const std::string& path);
    std::string to_json_text() const;

    // Scenario tree per the configured source; `generate` also returns the
    // simulated sample count through `n_paths`.
    ScenarioTree make_tree(const PowerNetwork& net, int* n_paths = nullptr) const;

    // Testing tree from test_scenario / the derived depth-1 default; throws
    // ConfigError when no testing source can be determined.
    ScenarioTree make_test_tree(const PowerNetwork& net) const;
};

// Parses a {"options": .., "engine": .., "solver": ..} JSON object (any subset
// of keys) on top of the given defaults. Shared by RunConfig and the C API.
void parse_settings_text(const std::string& text, FormulationOptions& options,
                         EngineConfig& engine);

struct CliOverrides {
    std::optional<double> beta;
    std::optional<std::string> cut_family;
    std::optional<double> epsilon;
    std::optional<long> seed;
    std::optional<int> threads;
    std::optional<std::string> output_dir;
};

void apply_overrides(RunConfig& config, const CliOverrides& overrides);

}  // namespace wildgrid
