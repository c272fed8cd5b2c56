#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "grid.hpp"

namespace wildgrid {

// One wildfire disruption event on a sample path. Component indices refer to
// the network's flat component space.
struct DisruptionEvent {
    int onset = 0;                             // in {2..T}
    std::vector<int> fault_components;         // u_c = 1 (sorted)
    std::vector<int> exogenous_components;     // v_c = 1 (sorted)
    std::map<int, std::vector<int>> spread_sets;  // c -> I_c, keys = fault components

    std::string dedup_key() const;
    bool operator==(const DisruptionEvent& o) const = default;
};

using SamplePath = std::vector<DisruptionEvent>;  // chronological, strictly increasing onsets

// A scenario-tree node: the root (onset 1, probability 1), a disruption
// realization, or a nominal child (onset T+1, no flags, no children).
struct DisruptionRealization {
    std::string id;
    std::string parent;  // empty for root
    int onset = 0;       // T+1 marks the nominal realization
    double probability = 1.0;
    std::vector<int> fault_components;
    std::vector<int> exogenous_components;
    std::map<int, std::vector<int>> spread_sets;
    std::vector<std::string> children;  // sibling order is canonical

    bool has_flags() const {
        return !fault_components.empty() || !exogenous_components.empty();
    }
};

struct ScenarioTree {
    int horizon_T = 0;
    int depth_limit = 1;
    std::string root_id = "root";
    std::map<std::string, DisruptionRealization> nodes;  // includes the root

    const DisruptionRealization& node(const std::string& id) const;
    const DisruptionRealization& root() const { return node(root_id); }
    bool is_nominal(const DisruptionRealization& n) const { return n.onset > horizon_T; }

    int depth(const std::string& id) const;      // root = 0
    double path_probability(const std::string& id) const;
    std::vector<std::string> nodes_by_depth_desc() const;  // non-root, non-nominal

    // Probability mass of the implicit nominal continuation of a node: 1 minus
    // the mass of its stored non-nominal children. Explicit nominal children
    // are folded into this number.
    double nominal_mass(const std::string& id) const;
    std::vector<std::string> disruption_children(const std::string& id) const;

    int node_count() const { return static_cast<int>(nodes.size()); }

    // Structural invariants: sibling probabilities sum to 1 per internal node
    // (tolerance 1e-9), onsets strictly increase along paths and lie in
    // {2..T} or T+1, spread sets contain their own component, acyclic links.
    void validate(const PowerNetwork* net = nullptr) const;
};

// Cellular-automaton parameters for wildfire sample-path simulation. Spread
// probability toward a neighbor is clamp(spread_prob * wind_bias^cos(a), 0, 1)
// where a is the angle between the wind direction and the neighbor direction;
// wind_bias = 1 is isotropic.
struct CaParams {
    int nx = 1;
    int ny = 1;
    double cell_km = 1.0;
    double ignition_rate = 0.0;   // per cell per period
    double spread_prob = 0.0;     // base neighbor spread probability
    double wind_direction = 0.0;  // radians, 0 = +x
    double wind_bias = 1.0;       // multiplicative, must be > 0
    double fault_rate = 0.0;      // per component per period
    std::map<std::string, std::pair<int, int>> component_cells;

    void validate(const PowerNetwork& net) const;  // throws InvalidParamsError
    std::string to_json_text() const;
    static CaParams from_json_text(const std::string& text);

    // When component_cells is empty: buses row-major across the grid,
    // generators and loads on their bus, lines on their from-bus.
    void apply_default_layout(const PowerNetwork& net);
};

// Simulates n wildfire sample paths. Deterministic given seed: sample i uses
// an independent RNG stream derived from (seed, i). Paths with no event are
// returned empty (nominal).
std::vector<SamplePath> simulate_paths(const PowerNetwork& net, const CaParams& params,
                                       int n, std::uint64_t seed, int max_disruptions);

// CA spread set I_c for a fault at `component` revealed at period `onset`:
// the components whose cells the fire reaches within the remaining horizon.
std::vector<int> spread_set(const PowerNetwork& net, const CaParams& params, int component,
                            int onset, std::mt19937_64& rng);

// Folds sample paths into a scenario tree by exact dedup of events; distinct
// first events become depth-1 children with multiplicity/n probability, the
// residual mass is the nominal child, recursion on suffixes up to depth_limit.
// Zero-probability nominal children are pruned.
ScenarioTree build_tree(const std::vector<SamplePath>& paths, int horizon_T, int depth_limit);

ScenarioTree tree_from_json_text(const std::string& text, const PowerNetwork& net);
std::string tree_to_json_text(const ScenarioTree& tree, const PowerNetwork& net);
ScenarioTree load_tree(const std::string& path, const PowerNetwork& net);
void save_tree(const ScenarioTree& tree, const PowerNetwork& net, const std::string& path);

}  // namespace wildgrid
