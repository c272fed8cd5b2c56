#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "testlib.hpp"

using namespace wildgrid;

namespace {

CaParams quiet_params(const PowerNetwork& net) {
    CaParams p;
    p.nx = 4;
    p.ny = 4;
    p.apply_default_layout(net);
    return p;
}

// independent lattice oracle: cells within Chebyshev distance `steps`
std::set<std::pair<int, int>> flood_oracle(int nx, int ny, std::pair<int, int> origin, int steps) {
    std::set<std::pair<int, int>> out;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            if (std::max(std::abs(x - origin.first), std::abs(y - origin.second)) <= steps)
                out.insert({x, y});
    return out;
}

}  // namespace

TEST_CASE("no randomness sources produce nominal paths") {
    PowerNetwork net = wgtest::toy3();
    CaParams p = quiet_params(net);
    auto paths = simulate_paths(net, p, 20, 1, 2);
    CHECK(paths.size() == 20);
    for (const auto& path : paths) CHECK(path.empty());
}

TEST_CASE("deterministic flood fill covers the Chebyshev ball") {
    PowerNetwork net;
    net.horizon_T = 6;
    net.buses = {{"b1", true, -1}};
    // components strung along a 1x8 strip
    for (int k = 0; k < 7; ++k)
        net.generators.push_back({"g" + std::to_string(k), "b1", 0, 10, -1, FuelType::Wind});
    net.finalize();
    CaParams p;
    p.nx = 8;
    p.ny = 1;
    p.spread_prob = 1.0;
    p.wind_bias = 1.0;
    p.component_cells["b1"] = {0, 0};
    for (int k = 0; k < 7; ++k) p.component_cells["g" + std::to_string(k)] = {k + 1, 0};

    int onset = 4;  // two remaining periods
    std::mt19937_64 rng(5);
    auto set = spread_set(net, p, *net.component_index("b1"), onset, rng);
    // oracle: everything within T - onset cells of the origin
    auto cells = flood_oracle(8, 1, {0, 0}, net.horizon_T - onset);
    std::vector<int> expected;
    for (int ci = 0; ci < net.component_count(); ++ci)
        if (cells.count(p.component_cells.at(net.component_id(ci)))) expected.push_back(ci);
    CHECK(set == expected);

    SUBCASE("onset at the horizon reaches only the origin cell") {
        auto tiny = spread_set(net, p, *net.component_index("b1"), net.horizon_T, rng);
        CHECK(tiny == std::vector<int>{*net.component_index("b1")});
    }
    SUBCASE("zero spread probability stays at the fault") {
        CaParams q = p;
        q.spread_prob = 0.0;
        auto only = spread_set(net, q, *net.component_index("b1"), 2, rng);
        CHECK(only == std::vector<int>{*net.component_index("b1")});
    }
}

TEST_CASE("fig-1 spread set is reproduced exactly") {
    auto fx = wgtest::fig1_fixture();
    std::mt19937_64 rng(11);
    auto set = spread_set(fx.net, fx.params, fx.fault_component, 2, rng);
    CHECK(set == fx.expected_set);
}

TEST_CASE("simulate_paths is reproducible and respects limits") {
    PowerNetwork net = wgtest::toy3();
    CaParams p = quiet_params(net);
    p.fault_rate = 0.08;
    p.ignition_rate = 0.02;
    p.spread_prob = 0.5;
    auto a = simulate_paths(net, p, 64, 42, 2);
    auto b = simulate_paths(net, p, 64, 42, 2);
    CHECK(a == b);
    auto c = simulate_paths(net, p, 64, 43, 2);
    CHECK(a != c);
    bool any = false;
    for (const auto& path : a) {
        CHECK(path.size() <= 2);
        int last = 1;
        for (const auto& ev : path) {
            CHECK(ev.onset >= 2);
            CHECK(ev.onset <= net.horizon_T);
            CHECK(ev.onset > last);
            last = ev.onset;
            for (const auto& [comp, spread] : ev.spread_sets)
                CHECK(std::find(spread.begin(), spread.end(), comp) != spread.end());
            any = true;
        }
    }
    CHECK(any);
    CHECK_THROWS_AS(simulate_paths(net, p, 0, 1, 2), InvalidParamsError);
    CaParams bad = p;
    bad.spread_prob = 1.5;
    CHECK_THROWS_AS(simulate_paths(net, bad, 1, 1, 2), InvalidParamsError);
}

TEST_CASE("build_tree folds duplicate events by counting") {
    PowerNetwork net = wgtest::toy3();
    DisruptionEvent ev = wgtest::make_event(2, {0}, {{0, {0, 3}}}, {});
    std::vector<SamplePath> paths = {{}, {}, {ev}, {ev}};
    ScenarioTree tree = build_tree(paths, net.horizon_T, 2);
    auto kids = tree.root().children;
    REQUIRE(kids.size() == 2);
    const auto& c0 = tree.node(kids[0]);
    const auto& c1 = tree.node(kids[1]);
    CHECK(c0.probability == doctest::Approx(0.5));
    CHECK(c1.probability == doctest::Approx(0.5));
    CHECK(tree.is_nominal(c1));
    CHECK_FALSE(tree.is_nominal(c0));

    SUBCASE("shared first event with distinct second events prunes the zero nominal") {
        DisruptionEvent ev2a = wgtest::make_event(3, {1}, {{1, {1}}}, {});
        DisruptionEvent ev2b = wgtest::make_event(4, {2}, {{2, {2}}}, {});
        std::vector<SamplePath> deep = {{ev, ev2a}, {ev, ev2b}};
        ScenarioTree t2 = build_tree(deep, net.horizon_T, 2);
        auto depth1 = t2.disruption_children(t2.root_id);
        REQUIRE(depth1.size() == 1);
        const auto& mid = t2.node(depth1[0]);
        CHECK(mid.probability == doctest::Approx(1.0));
        // two depth-2 children at 0.5 each, no nominal sibling stored
        CHECK(mid.children.size() == 2);
        CHECK(t2.nominal_mass(depth1[0]) == doctest::Approx(0.0));
    }

    SUBCASE("paths beyond the depth limit are truncated") {
        DisruptionEvent ev2 = wgtest::make_event(3, {1}, {{1, {1}}}, {});
        DisruptionEvent ev3 = wgtest::make_event(4, {2}, {{2, {2}}}, {});
        std::vector<SamplePath> deep = {{ev, ev2, ev3}};
        ScenarioTree t3 = build_tree(deep, net.horizon_T, 2);
        int max_depth = 0;
        for (const auto& [id, node] : t3.nodes)
            if (!t3.is_nominal(node)) max_depth = std::max(max_depth, t3.depth(id));
        CHECK(max_depth == 2);
    }

    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(build_tree({}, net.horizon_T, 2), EmptyInputError);
    }
}

TEST_CASE("tree invariants: probabilities and path mass") {
    PowerNetwork net = wgtest::toy3();
    CaParams p = quiet_params(net);
    p.fault_rate = 0.10;
    p.spread_prob = 0.4;
    auto paths = simulate_paths(net, p, 200, 9, 2);
    ScenarioTree tree = build_tree(paths, net.horizon_T, 2);
    tree.validate(&net);

    // sibling probabilities sum to one at every internal node
    for (const auto& [id, node] : tree.nodes) {
        if (node.children.empty()) continue;
        double sum = 0.0;
        for (const auto& cid : node.children) sum += tree.node(cid).probability;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    // root-to-leaf mass totals one
    double mass = 0.0;
    for (const auto& [id, node] : tree.nodes)
        if (node.children.empty()) mass += tree.path_probability(id);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tree JSON round-trip and validation failures") {
    PowerNetwork net = wgtest::toy3();
    DisruptionEvent ev = wgtest::make_event(2, {0}, {{0, {0, 3}}}, {5});
    std::vector<SamplePath> paths = {{}, {ev}};
    ScenarioTree tree = build_tree(paths, net.horizon_T, 2);
    std::string text = tree_to_json_text(tree, net);
    ScenarioTree back = tree_from_json_text(text, net);
    CHECK(tree_to_json_text(back, net) == text);

    SUBCASE("sibling probabilities must sum to one") {
        std::string broken = text;
        auto pos = broken.find("0.5");
        REQUIRE(pos != std::string::npos);
        broken.replace(pos, 3, "0.4");
        CHECK_THROWS_AS(tree_from_json_text(broken, net), ValidationError);
    }
    SUBCASE("empty nodes map is rejected") {
        CHECK_THROWS_AS(tree_from_json_text(R"({"horizon_T": 4, "nodes": {}})", net),
                        ValidationError);
    }
    SUBCASE("unknown component is rejected") {
        std::string bad = text;
        auto pos = bad.find("\"l13\"");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 5, "\"zzz\"");
        CHECK_THROWS_AS(tree_from_json_text(bad, net), ValidationError);
    }
}
