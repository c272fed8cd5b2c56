// wildgrid command-line driver. Thin shell over the C API: parses arguments,
// assembles the override JSON, maps status codes to exit codes.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wildgrid.h"

namespace {

int exit_code_for(wg_status status) {
    switch (status) {
        case WG_OK: return 0;
        case WG_EPARSE:
        case WG_EVALIDATE:
        case WG_ECONFIG:
        case WG_ESIZE:
        case WG_EIO: return 2;
        case WG_EINFEASIBLE: return 3;
        case WG_EBACKEND:
        case WG_ERROR:
        default: return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"De-energization planning under stochastic wildfire disruptions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::string plan_path;
    std::string test_tree_path;
    std::string cut_family;
    std::vector<double> betas;
    double beta = -1.0;
    double epsilon = -1.0;
    long seed = 0;
    int threads = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration JSON")->required();
        cmd->add_option("--output", output_dir, "output directory override");
        cmd->add_option("--threads", threads, "solver thread override");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            has_seed = true;
        });
    };

    CLI::App* generate = app.add_subcommand("generate", "simulate wildfire scenarios into a tree");
    add_common(generate);

    CLI::App* solve = app.add_subcommand("solve", "run the cutting-plane decomposition");
    add_common(solve);
    solve->add_option("--beta", beta, "fairness level override");
    solve->add_option("--cut-family", cut_family, "BC, SBC, LC or SMC");
    solve->add_option("--epsilon", epsilon, "relative gap override");

    CLI::App* evaluate = app.add_subcommand("evaluate", "out-of-sample evaluation of a plan");
    add_common(evaluate);
    evaluate->add_option("--plan", plan_path, "nominal plan JSON (default: <output>/plan.json)");
    evaluate->add_option("--test-tree", test_tree_path, "testing scenario tree JSON");

    CLI::App* compare = app.add_subcommand("compare", "restoration vs no-restoration table");
    add_common(compare);
    compare->add_option("--betas", betas, "fairness levels to sweep")->expected(-1);
    compare->add_option("--test-tree", test_tree_path, "testing scenario tree JSON");
    compare->add_option("--cut-family", cut_family, "BC, SBC, LC or SMC");
    compare->add_option("--epsilon", epsilon, "relative gap override");

    CLI11_PARSE(app, argc, argv);

    nlohmann::json overrides;
    if (!output_dir.empty()) overrides["output"] = output_dir;
    if (!plan_path.empty()) overrides["plan"] = plan_path;
    if (!test_tree_path.empty()) overrides["test_tree"] = test_tree_path;
    if (!cut_family.empty()) overrides["cut_family"] = cut_family;
    if (!betas.empty()) overrides["betas"] = betas;
    if (beta >= 0.0) overrides["beta"] = beta;
    if (epsilon >= 0.0) overrides["epsilon"] = epsilon;
    if (has_seed) overrides["seed"] = seed;
    if (threads > 0) overrides["threads"] = threads;

    const char* command = app.get_subcommands().front()->get_name().c_str();
    std::string overrides_text = overrides.dump();
    wg_status status = wg_run_command(command, config_path.c_str(), overrides_text.c_str());
    if (status != WG_OK) {
        std::fprintf(stderr, "wildgrid %s failed: %s\n", command, wg_last_error());
        return exit_code_for(status);
    }
    std::printf("wildgrid %s: done\n", command);
    return 0;
}
