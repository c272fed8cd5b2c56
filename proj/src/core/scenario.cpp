#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wildgrid {

using nlohmann::json;

std::string DisruptionEvent::dedup_key() const {
    std::ostringstream os;
    os << onset << "|u:";
    for (int c : fault_components) os << c << ",";
    os << "|v:";
    for (int c : exogenous_components) os << c << ",";
    os << "|I:";
    for (const auto& [c, set] : spread_sets) {
        os << c << ":";
        for (int k : set) os << k << ",";
        os << ";";
    }
    return os.str();
}

const DisruptionRealization& ScenarioTree::node(const std::string& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw ValidationError("scenario tree has no node " + id);
    return it->second;
}

int ScenarioTree::depth(const std::string& id) const {
    int d = 0;
    const DisruptionRealization* n = &node(id);
    while (!n->parent.empty()) {
        n = &node(n->parent);
        ++d;
    }
    return d;
}

double ScenarioTree::path_probability(const std::string& id) const {
    double p = 1.0;
    const DisruptionRealization* n = &node(id);
    while (true) {
        p *= n->probability;
        if (n->parent.empty()) break;
        n = &node(n->parent);
    }
    return p;
}

double ScenarioTree::nominal_mass(const std::string& id) const {
    double mass = 1.0;
    for (const std::string& cid : node(id).children) {
        const DisruptionRealization& c = node(cid);
        if (!is_nominal(c)) mass -= c.probability;
    }
    return std::max(0.0, mass);
}

std::vector<std::string> ScenarioTree::disruption_children(const std::string& id) const {
    std::vector<std::string> out;
    for (const std::string& cid : node(id).children)
        if (!is_nominal(node(cid))) out.push_back(cid);
    return out;
}

std::vector<std::string> ScenarioTree::nodes_by_depth_desc() const {
    std::vector<std::pair<int, std::string>> tagged;
    for (const auto& [id, n] : nodes) {
        if (id == root_id || is_nominal(n)) continue;
        tagged.emplace_back(depth(id), id);
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> out;
    out.reserve(tagged.size());
    for (auto& [d, id] : tagged) out.push_back(id);
    return out;
}

void ScenarioTree::validate(const PowerNetwork* net) const {
    if (horizon_T < 1) throw ValidationError("scenario tree: horizon_T must be >= 1");
    if (nodes.empty()) throw ValidationError("scenario tree: empty nodes map");
    auto rit = nodes.find(root_id);
    if (rit == nodes.end()) throw ValidationError("scenario tree: missing root node");
    if (!rit->second.parent.empty()) throw ValidationError("scenario tree: root has a parent");
    if (std::abs(rit->second.probability - 1.0) > 1e-9)
        throw ValidationError("scenario tree: root probability must be 1");

    std::set<std::string> reached;
    std::function<void(const std::string&, int)> walk = [&](const std::string& id, int parent_onset) {
        if (!reached.insert(id).second)
            throw ValidationError("scenario tree: node " + id + " reached twice (cycle or shared child)");
        const DisruptionRealization& n = node(id);
        if (id != root_id) {
            if (n.probability <= 0.0 || n.probability > 1.0 + 1e-12)
                throw ValidationError("scenario tree: node " + id + " has probability outside (0,1]");
            if (is_nominal(n)) {
                if (!n.children.empty())
                    throw ValidationError("scenario tree: nominal node " + id + " has children");
                if (n.has_flags())
                    throw ValidationError("scenario tree: nominal node " + id + " has nonzero flags");
                if (n.onset != horizon_T + 1)
                    throw ValidationError("scenario tree: nominal node " + id + " onset must be T+1");
            } else {
                if (n.onset < 2 || n.onset > horizon_T)
                    throw ValidationError("scenario tree: node " + id + " onset outside {2..T}");
                if (n.onset < parent_onset + 1)
                    throw ValidationError("scenario tree: node " + id + " onset does not increase strictly");
            }
        }
        for (const auto& [c, set] : n.spread_sets) {
            if (std::find(set.begin(), set.end(), c) == set.end())
                throw ValidationError("scenario tree: spread set of node " + id +
                                      " does not contain its own component");
            if (net) {
                auto check = [&](int ci) {
                    if (ci < 0 || ci >= net->component_count())
                        throw ValidationError("scenario tree: component index out of range in " + id);
                };
                check(c);
                for (int k : set) check(k);
            }
        }
        if (!n.children.empty()) {
            double sum = 0.0;
            int nominal_children = 0;
            for (const std::string& cid : n.children) {
                const DisruptionRealization& c = node(cid);
                if (c.parent != id)
                    throw ValidationError("scenario tree: node " + cid + " parent link mismatch");
                sum += c.probability;
                if (is_nominal(c)) ++nominal_children;
            }
            if (nominal_children > 1)
                throw ValidationError("scenario tree: node " + id + " has several nominal children");
            if (std::abs(sum - 1.0) > 1e-9)
                throw ValidationError("scenario tree: children of " + id + " have probabilities summing to " +
                                      std::to_string(sum));
            for (const std::string& cid : n.children) walk(cid, n.onset);
        }
    };
    walk(root_id, 0);
    if (reached.size() != nodes.size())
        throw ValidationError("scenario tree: nodes not reachable from the root");
}

// ---------------------------------------------------------------------------
// cellular automaton

void CaParams::validate(const PowerNetwork& net) const {
    if (nx < 1 || ny < 1) throw InvalidParamsError("CA grid must be at least 1x1");
    auto prob = [](double p, const char* name) {
        if (p < 0.0 || p > 1.0) throw InvalidParamsError(std::string(name) + " outside [0,1]");
    };
    prob(ignition_rate, "ignition_rate");
    prob(spread_prob, "spread_prob");
    prob(fault_rate, "fault_rate");
    if (wind_bias <= 0.0) throw InvalidParamsError("wind_bias must be > 0");
    if (cell_km <= 0.0) throw InvalidParamsError("cell_km must be > 0");
    for (int ci = 0; ci < net.component_count(); ++ci) {
        auto it = component_cells.find(net.component_id(ci));
        if (it == component_cells.end())
            throw InvalidParamsError("component " + net.component_id(ci) + " has no CA cell");
        auto [x, y] = it->second;
        if (x < 0 || x >= nx || y < 0 || y >= ny)
            throw InvalidParamsError("component " + net.component_id(ci) + " cell outside the grid");
    }
}

namespace {

constexpr int kNeighborDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kNeighborDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

double neighbor_spread_prob(const CaParams& p, int dir) {
    double dx = kNeighborDx[dir], dy = kNeighborDy[dir];
    double norm = std::sqrt(dx * dx + dy * dy);
    double cos_a = (dx * std::cos(p.wind_direction) + dy * std::sin(p.wind_direction)) / norm;
    return std::clamp(p.spread_prob * std::pow(p.wind_bias, cos_a), 0.0, 1.0);
}

// One-shot frontier CA: a cell ignites its neighbors the step after it starts
// burning, then burns out. Returns all cells reached within `steps`.
std::vector<char> run_spread(const CaParams& p, const std::vector<int>& origin_cells, int steps,
                             std::mt19937_64& rng) {
    std::vector<char> burned(static_cast<size_t>(p.nx) * p.ny, 0);
    std::vector<int> frontier;
    for (int cell : origin_cells) {
        if (!burned[cell]) {
            burned[cell] = 1;
            frontier.push_back(cell);
        }
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < steps && !frontier.empty(); ++s) {
        std::vector<int> next;
        for (int cell : frontier) {
            int x = cell % p.nx, y = cell / p.nx;
            for (int dir = 0; dir < 8; ++dir) {
                int nx2 = x + kNeighborDx[dir], ny2 = y + kNeighborDy[dir];
                if (nx2 < 0 || nx2 >= p.nx || ny2 < 0 || ny2 >= p.ny) continue;
                int ncell = ny2 * p.nx + nx2;
                if (burned[ncell]) continue;
                if (unif(rng) < neighbor_spread_prob(p, dir)) {
                    burned[ncell] = 1;
                    next.push_back(ncell);
                }
            }
        }
        frontier = std::move(next);
    }
    return burned;
}

int cell_of(const CaParams& p, const PowerNetwork& net, int ci) {
    auto [x, y] = p.component_cells.at(net.component_id(ci));
    return y * p.nx + x;
}

std::vector<int> components_in(const PowerNetwork& net, const CaParams& p,
                               const std::vector<char>& burned) {
    std::vector<int> out;
    for (int ci = 0; ci < net.component_count(); ++ci)
        if (burned[cell_of(p, net, ci)]) out.push_back(ci);
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void CaParams::apply_default_layout(const PowerNetwork& net) {
    if (!component_cells.empty()) return;
    auto bus_cell = [&](int b) {
        int cell = b % (nx * ny);
        return std::pair<int, int>{cell % nx, cell / nx};
    };
    for (int b = 0; b < net.bus_count(); ++b) component_cells[net.buses[b].id] = bus_cell(b);
    for (const Generator& g : net.generators)
        component_cells[g.id] = bus_cell(net.bus_index_of(g.bus));
    for (const Line& l : net.lines)
        component_cells[l.id] = bus_cell(net.bus_index_of(l.from_bus));
}

std::vector<int> spread_set(const PowerNetwork& net, const CaParams& params, int component,
                            int onset, std::mt19937_64& rng) {
    int steps = std::max(0, net.horizon_T - onset);
    auto burned = run_spread(params, {cell_of(params, net, component)}, steps, rng);
    auto comps = components_in(net, params, burned);
    if (std::find(comps.begin(), comps.end(), component) == comps.end())
        comps.insert(std::lower_bound(comps.begin(), comps.end(), component), component);
    return comps;
}

std::vector<SamplePath> simulate_paths(const PowerNetwork& net, const CaParams& params,
                                       int n, std::uint64_t seed, int max_disruptions) {
    if (n < 1) throw InvalidParamsError("simulate_paths: n must be >= 1");
    if (max_disruptions < 1) throw InvalidParamsError("simulate_paths: max_disruptions must be >= 1");
    params.validate(net);

    std::vector<SamplePath> paths(n);
    int n_cells = params.nx * params.ny;
    for (int i = 0; i < n; ++i) {
        // independent stream per sample
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        SamplePath& path = paths[i];
        for (int t = 2; t <= net.horizon_T; ++t) {
            if (static_cast<int>(path.size()) >= max_disruptions) break;
            DisruptionEvent ev;
            ev.onset = t;
            for (int ci = 0; ci < net.component_count(); ++ci)
                if (params.fault_rate > 0.0 && unif(rng) < params.fault_rate)
                    ev.fault_components.push_back(ci);
            std::vector<int> ignited;
            for (int cell = 0; cell < n_cells; ++cell)
                if (params.ignition_rate > 0.0 && unif(rng) < params.ignition_rate)
                    ignited.push_back(cell);
            if (ev.fault_components.empty() && ignited.empty()) continue;
            for (int c : ev.fault_components)
                ev.spread_sets[c] = spread_set(net, params, c, t, rng);
            if (!ignited.empty()) {
                auto burned = run_spread(params, ignited, std::max(0, net.horizon_T - t), rng);
                ev.exogenous_components = components_in(net, params, burned);
            }
            // events that end up touching no component are not disruptions
            if (ev.fault_components.empty() && ev.exogenous_components.empty()) continue;
            path.push_back(std::move(ev));
        }
    }
    return paths;
}

// ---------------------------------------------------------------------------
// tree building

namespace {

struct TreeBuilder {
    int horizon_T;
    int depth_limit;
    ScenarioTree tree;
    int next_id = 1;

    std::string fresh_id() { return "n" + std::to_string(next_id++); }

    // `suffixes` are the path tails assigned to `parent_id`; the first event
    // of each tail (if any) decides the child branch.
    void assign_children(const std::string& parent_id, const std::vector<const SamplePath*>& suffixes,
                         const std::vector<size_t>& offsets, int depth) {
        size_t m = suffixes.size();
        std::map<std::string, std::vector<size_t>> groups;  // sorted by dedup key
        size_t nominal_count = 0;
        for (size_t s = 0; s < m; ++s) {
            bool has_event = offsets[s] < suffixes[s]->size();
            if (depth >= depth_limit || !has_event) {
                ++nominal_count;  // truncation drops any remaining events
            } else {
                groups[(*suffixes[s])[offsets[s]].dedup_key()].push_back(s);
            }
        }
        auto& parent = tree.nodes.at(parent_id);
        for (const auto& [key, members] : groups) {
            const DisruptionEvent& ev = (*suffixes[members[0]])[offsets[members[0]]];
            DisruptionRealization node;
            node.id = fresh_id();
            node.parent = parent_id;
            node.onset = ev.onset;
            node.probability = static_cast<double>(members.size()) / static_cast<double>(m);
            node.fault_components = ev.fault_components;
            node.exogenous_components = ev.exogenous_components;
            node.spread_sets = ev.spread_sets;
            parent.children.push_back(node.id);
            std::string id = node.id;
            tree.nodes.emplace(id, std::move(node));

            std::vector<const SamplePath*> child_suffixes;
            std::vector<size_t> child_offsets;
            for (size_t s : members) {
                child_suffixes.push_back(suffixes[s]);
                child_offsets.push_back(offsets[s] + 1);
            }
            assign_children(id, child_suffixes, child_offsets, depth + 1);
        }
        if (nominal_count > 0) {
            DisruptionRealization nom;
            nom.id = fresh_id();
            nom.parent = parent_id;
            nom.onset = horizon_T + 1;
            nom.probability = static_cast<double>(nominal_count) / static_cast<double>(m);
            tree.nodes.at(parent_id).children.push_back(nom.id);
            tree.nodes.emplace(nom.id, std::move(nom));
        }
    }
};

}  // namespace

ScenarioTree build_tree(const std::vector<SamplePath>& paths, int horizon_T, int depth_limit) {
    if (paths.empty()) throw EmptyInputError("build_tree: no sample paths");
    if (depth_limit < 1) throw InvalidParamsError("build_tree: depth_limit must be >= 1");

    TreeBuilder b;
    b.horizon_T = horizon_T;
    b.depth_limit = depth_limit;
    b.tree.horizon_T = horizon_T;
    b.tree.depth_limit = depth_limit;
    DisruptionRealization root;
    root.id = b.tree.root_id;
    root.onset = 1;
    root.probability = 1.0;
    b.tree.nodes.emplace(root.id, std::move(root));

    std::vector<const SamplePath*> suffixes;
    std::vector<size_t> offsets(paths.size(), 0);
    suffixes.reserve(paths.size());
    for (const SamplePath& p : paths) suffixes.push_back(&p);
    b.assign_children(b.tree.root_id, suffixes, offsets, 0);

    b.tree.validate();
    return b.tree;
}

// ---------------------------------------------------------------------------
// JSON round-trip

namespace {

json flags_to_json(const PowerNetwork& net, const std::vector<int>& comps) {
    json j = json::object();
    for (int c : comps) j[net.component_id(c)] = 1;
    return j;
}

std::vector<int> flags_from_json(const PowerNetwork& net, const json& j) {
    std::vector<int> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().get<int>() == 0) continue;
        auto ci = net.component_index(it.key());
        if (!ci) throw ValidationError("scenario tree references unknown component " + it.key());
        out.push_back(*ci);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string tree_to_json_text(const ScenarioTree& tree, const PowerNetwork& net) {
    json nodes = json::object();
    for (const auto& [id, n] : tree.nodes) {
        json jn;
        jn["parent"] = n.parent.empty() ? json() : json(n.parent);
        jn["onset"] = n.onset;
        jn["probability"] = n.probability;
        jn["fault_flags"] = flags_to_json(net, n.fault_components);
        jn["exogenous_flags"] = flags_to_json(net, n.exogenous_components);
        json spread = json::object();
        for (const auto& [c, set] : n.spread_sets) {
            json arr = json::array();
            for (int k : set) arr.push_back(net.component_id(k));
            spread[net.component_id(c)] = arr;
        }
        jn["spread_sets"] = spread;
        jn["children"] = n.children;
        nodes[id] = jn;
    }
    json j{{"horizon_T", tree.horizon_T},
           {"depth_limit", tree.depth_limit},
           {"root", tree.root_id},
           {"nodes", nodes}};
    return j.dump(2);
}

ScenarioTree tree_from_json_text(const std::string& text, const PowerNetwork& net) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario tree JSON: ") + e.what());
    }
    ScenarioTree tree;
    try {
        tree.horizon_T = j.at("horizon_T").get<int>();
        tree.depth_limit = j.value("depth_limit", 1);
        tree.root_id = j.value("root", "root");
        for (auto it = j.at("nodes").begin(); it != j.at("nodes").end(); ++it) {
            const json& jn = it.value();
            DisruptionRealization n;
            n.id = it.key();
            n.parent = jn.at("parent").is_null() ? "" : jn.at("parent").get<std::string>();
            n.onset = jn.at("onset").get<int>();
            n.probability = jn.at("probability").get<double>();
            n.fault_components = flags_from_json(net, jn.value("fault_flags", json::object()));
            n.exogenous_components = flags_from_json(net, jn.value("exogenous_flags", json::object()));
            for (auto sit = jn.value("spread_sets", json::object()).begin();
                 sit != jn.value("spread_sets", json::object()).end(); ++sit) {
                auto ci = net.component_index(sit.key());
                if (!ci) throw ValidationError("scenario tree references unknown component " + sit.key());
                std::vector<int> set;
                for (const json& k : sit.value()) {
                    auto ki = net.component_index(k.get<std::string>());
                    if (!ki) throw ValidationError("scenario tree references unknown component " +
                                                   k.get<std::string>());
                    set.push_back(*ki);
                }
                std::sort(set.begin(), set.end());
                n.spread_sets[*ci] = set;
            }
            n.children = jn.value("children", std::vector<std::string>{});
            tree.nodes.emplace(n.id, std::move(n));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario tree JSON: ") + e.what());
    }
    tree.validate(&net);
    return tree;
}

ScenarioTree load_tree(const std::string& path, const PowerNetwork& net) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario tree file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return tree_from_json_text(ss.str(), net);
}

void save_tree(const ScenarioTree& tree, const PowerNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scenario tree file: " + path);
    out << tree_to_json_text(tree, net) << "\n";
}

std::string CaParams::to_json_text() const {
    json cells = json::object();
    for (const auto& [id, cell] : component_cells) cells[id] = json::array({cell.first, cell.second});
    json j{{"grid_cells", json::array({nx, ny})},
           {"cell_km", cell_km},
           {"ignition_rate", ignition_rate},
           {"spread_prob", spread_prob},
           {"wind", json::array({wind_direction, wind_bias})},
           {"fault_rate", fault_rate},
           {"component_cells", cells}};
    return j.dump(2);
}

CaParams CaParams::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("CA params JSON: ") + e.what());
    }
    CaParams p;
    try {
        p.nx = j.at("grid_cells").at(0).get<int>();
        p.ny = j.at("grid_cells").at(1).get<int>();
        p.cell_km = j.value("cell_km", 1.0);
        p.ignition_rate = j.at("ignition_rate").get<double>();
        p.spread_prob = j.at("spread_prob").get<double>();
        p.wind_direction = j.at("wind").at(0).get<double>();
        p.wind_bias = j.at("wind").at(1).get<double>();
        p.fault_rate = j.at("fault_rate").get<double>();
        json cells = j.value("component_cells", json::object());
        for (auto it = cells.begin(); it != cells.end(); ++it)
            p.component_cells[it.key()] = {it.value().at(0).get<int>(), it.value().at(1).get<int>()};
    } catch (const json::exception& e) {
        throw ParseError(std::string("CA params JSON: ") + e.what());
    }
    return p;
}

}  // namespace wildgrid
