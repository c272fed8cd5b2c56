// Shared fixtures for the test suites: canonical instances, synthetic
// scenario trees, and the constructed integrality-gap instance.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "evaluate.hpp"

#ifndef WILDGRID_DATA_DIR
#define WILDGRID_DATA_DIR "data"
#endif

namespace wgtest {

using namespace wildgrid;

inline std::string data_path(const std::string& name) {
    return std::string(WILDGRID_DATA_DIR) + "/" + name;
}

inline PowerNetwork toy3() { return load_network(data_path("toy3.json")); }

inline ScenarioTree nominal_tree(int horizon_T) {
    std::vector<SamplePath> paths(1);  // one empty path: nominal only
    return build_tree(paths, horizon_T, 1);
}

// One disruption event usable in hand-built paths.
inline DisruptionEvent make_event(int onset, std::vector<int> faults,
                                  std::map<int, std::vector<int>> spreads,
                                  std::vector<int> exogenous) {
    DisruptionEvent ev;
    ev.onset = onset;
    ev.fault_components = std::move(faults);
    ev.exogenous_components = std::move(exogenous);
    ev.spread_sets = std::move(spreads);
    return ev;
}

// Tree with a single disruption child (probability p, nominal mass 1-p).
inline ScenarioTree one_event_tree(int horizon_T, const DisruptionEvent& ev, double p,
                                   int copies = 1) {
    int total = copies;
    int with_event = static_cast<int>(std::lround(p * copies));
    if (p > 0.0 && with_event == 0) {
        // exact probabilities via multiplicity: p must be k/copies
        with_event = 1;
        total = static_cast<int>(std::lround(copies / p));
    }
    std::vector<SamplePath> paths;
    for (int i = 0; i < with_event; ++i) paths.push_back({ev});
    for (int i = with_event; i < total; ++i) paths.push_back({});
    return build_tree(paths, horizon_T, 2);
}

// Two parallel lines with a 100x susceptance mismatch: the subproblem's LP
// relaxation serves the whole load through a fractionally-switched line while
// every integral switching pattern sheds. The disruption is a cheap exogenous
// loss of the stub line lC.
struct GapInstance {
    PowerNetwork net;
    ScenarioTree tree;
    FormulationOptions options;
    std::string node_id;  // the single disruption node
};

inline GapInstance gap_instance(int horizon_T = 3) {
    PowerNetwork net;
    net.horizon_T = horizon_T;
    net.buses = {{"b1", true, 50.0}, {"b2", false, 50.0}, {"b3", false, 50.0}};
    net.generators = {{"g1", "b1", 0.0, 12.0, 1000.0, FuelType::Thermal}};
    net.lines = {{"lA", "b1", "b2", 0.2, 8.0, 10.0, 1.0},
                 {"lB", "b1", "b2", 20.0, 8.0, 10.0, 1.0},
                 {"lC", "b1", "b3", 10.0, 50.0, 10.0, 5.0}};
    net.loads = {{"d2", "b2", std::vector<double>(horizon_T, 10.0), 100.0}};
    net.finalize();

    GapInstance gi;
    gi.net = net;
    int lc = *net.component_index("lC");
    DisruptionEvent ev = make_event(2, {}, {}, {lc});
    gi.tree = one_event_tree(horizon_T, ev, 1.0);
    gi.node_id = gi.tree.disruption_children(gi.tree.root_id).front();
    gi.options.beta = 1.0;
    gi.options.restoration = false;
    gi.options.fairness_enabled = false;
    return gi;
}

// Randomized small instance for the oracle-equivalence suite. Sizes grow with
// the index; the first few stay within 12 components so exhaustive cut
// validation stays cheap.
struct RandomInstance {
    PowerNetwork net;
    ScenarioTree tree;
    FormulationOptions options;
};

inline RandomInstance random_instance(std::uint64_t seed, int index) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(index) * 7919);
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    };

    int n_bus = (index < 3) ? 3 : pick(4, 8);
    int T = pick(3, 5);
    PowerNetwork net;
    net.horizon_T = T;
    for (int b = 0; b < n_bus; ++b)
        net.buses.push_back({"b" + std::to_string(b + 1), b == 0, unif(20, 80)});
    // spanning tree plus an extra chord when allowed
    int n_lines = 0;
    for (int b = 1; b < n_bus; ++b) {
        int parent = pick(1, b) - 1;
        net.lines.push_back({"l" + std::to_string(++n_lines), "b" + std::to_string(parent + 1),
                             "b" + std::to_string(b + 1), unif(5, 20), unif(40, 90), unif(10, 120),
                             unif(1, 30)});
    }
    if (index >= 3 && n_bus >= 4) {
        int a = pick(1, n_bus - 1), c = pick(1, n_bus - 1);
        if (a != c)
            net.lines.push_back({"l" + std::to_string(++n_lines), "b" + std::to_string(a),
                                 "b" + std::to_string(c), unif(5, 20), unif(40, 90), unif(10, 120),
                                 unif(1, 30)});
    }
    int n_gen = (index < 3) ? 1 : pick(1, 2);
    for (int g = 0; g < n_gen; ++g) {
        int at = (g == 0) ? 1 : pick(1, n_bus);
        net.generators.push_back({"g" + std::to_string(g + 1), "b" + std::to_string(at), 0.0,
                                  unif(60, 140), unif(100, 900),
                                  g % 2 == 0 ? FuelType::Thermal : FuelType::Wind});
    }
    int n_load = std::max(2, n_bus / 2);
    for (int d = 0; d < n_load; ++d) {
        int at = 1 + (d + 1) % n_bus;
        std::vector<double> demand(T);
        double base = unif(15, 45);
        for (int t = 0; t < T; ++t) demand[t] = base * unif(0.7, 1.2);
        net.loads.push_back(
            {"d" + std::to_string(d + 1), "b" + std::to_string(at), demand, unif(60, 800)});
    }
    net.finalize();

    // random sample paths with zero to two events each, folded exactly
    const int C = net.component_count();
    auto random_event = [&](int onset) {
        DisruptionEvent ev;
        ev.onset = onset;
        if (rng() % 2 == 0) {
            int c = pick(1, C) - 1;
            std::vector<int> spread{c};
            for (int extra = pick(0, 2); extra > 0; --extra) {
                int k = pick(1, C) - 1;
                if (std::find(spread.begin(), spread.end(), k) == spread.end()) spread.push_back(k);
            }
            std::sort(spread.begin(), spread.end());
            ev.fault_components = {c};
            ev.spread_sets[c] = spread;
        }
        if (ev.fault_components.empty() || rng() % 3 == 0)
            ev.exogenous_components = {pick(1, C) - 1};
        return ev;
    };
    int n_paths = pick(2, 5);
    std::vector<SamplePath> paths;
    for (int i = 0; i < n_paths; ++i) {
        SamplePath path;
        int events = pick(0, 2);
        int onset = 0;
        for (int e = 0; e < events; ++e) {
            int lo = (e == 0) ? 2 : onset + 1;
            if (lo > T) break;
            onset = pick(lo, T);
            path.push_back(random_event(onset));
        }
        paths.push_back(std::move(path));
    }
    bool any_event = false;
    for (const auto& p : paths) any_event |= !p.empty();
    if (!any_event) paths.push_back({random_event(2)});

    RandomInstance ri;
    ri.tree = build_tree(paths, T, 2);
    ri.net = std::move(net);
    ri.options.beta = std::vector<double>{0.1, 0.4, 1.0}[index % 3];
    ri.options.fairness_enabled = true;
    ri.options.restoration = (index % 2 == 0);
    return ri;
}

// Fig-1-style endogenous spread fixture: a 1x6 CA strip where a fault at bus
// "i" burns exactly {i, g2, (i,j1), (i,j3), j3} within two periods.
struct SpreadFixture {
    PowerNetwork net;
    CaParams params;
    int fault_component;
    std::vector<int> expected_set;
};

inline SpreadFixture fig1_fixture() {
    PowerNetwork net;
    net.horizon_T = 4;  // onset 2 leaves two spread steps
    net.buses = {{"i", true, -1}, {"j1", false, -1}, {"j3", false, -1}};
    net.generators = {{"g1", "i", 0.0, 50.0, -1, FuelType::Thermal},
                      {"g2", "i", 0.0, 50.0, -1, FuelType::Wind},
                      {"g3", "j1", 0.0, 50.0, -1, FuelType::Thermal}};
    net.lines = {{"li_j1", "i", "j1", 10.0, 50.0, 10.0, -1},
                 {"li_j3", "i", "j3", 10.0, 50.0, 10.0, -1},
                 {"lj1_j3", "j1", "j3", 10.0, 50.0, 10.0, -1}};
    net.loads = {{"d1", "j3", {10, 10, 10, 10}, 100.0}};
    net.finalize();

    SpreadFixture fx;
    fx.params.nx = 6;
    fx.params.ny = 1;
    fx.params.spread_prob = 1.0;
    fx.params.wind_bias = 1.0;
    fx.params.component_cells = {{"i", {0, 0}},     {"g2", {1, 0}},     {"li_j1", {1, 0}},
                                 {"li_j3", {2, 0}}, {"j3", {2, 0}},     {"g1", {3, 0}},
                                 {"j1", {4, 0}},    {"lj1_j3", {3, 0}}, {"g3", {5, 0}}};
    fx.net = std::move(net);
    fx.fault_component = *fx.net.component_index("i");
    fx.expected_set = {*fx.net.component_index("i"), *fx.net.component_index("g2"),
                       *fx.net.component_index("li_j1"), *fx.net.component_index("li_j3"),
                       *fx.net.component_index("j3")};
    std::sort(fx.expected_set.begin(), fx.expected_set.end());
    return fx;
}

inline SolverParams tight_params() {
    SolverParams p;
    p.mip_gap = 1e-9;
    return p;
}

}  // namespace wgtest
