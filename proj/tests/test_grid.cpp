#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testlib.hpp"

using namespace wildgrid;
using wgtest::data_path;

TEST_CASE("toy3 loads with the documented shape") {
    PowerNetwork net = wgtest::toy3();
    CHECK(net.bus_count() == 3);
    CHECK(net.generator_count() == 1);
    CHECK(net.line_count() == 2);
    CHECK(net.load_count() == 2);
    CHECK(net.horizon_T == 4);
    CHECK(net.reference_bus() == 0);
    CHECK(net.component_count() == 6);
}

TEST_CASE("dangling bus reference fails validation") {
    std::string text = R"({
      "horizon_T": 2,
      "buses": [{"id": "1", "is_reference": true}],
      "generators": [],
      "lines": [],
      "loads": [{"id": "d", "bus": "99", "demand_by_period": [1, 1]}]
    })";
    CHECK_THROWS_AS(network_from_json_text(text), ValidationError);
}

TEST_CASE("duplicate ids and missing reference bus are rejected") {
    std::string dup = R"({
      "horizon_T": 1,
      "buses": [{"id": "a", "is_reference": true}, {"id": "a"}],
      "loads": []
    })";
    CHECK_THROWS_AS(network_from_json_text(dup), ValidationError);
    std::string noref = R"({"horizon_T": 1, "buses": [{"id": "a"}], "loads": []})";
    CHECK_THROWS_AS(network_from_json_text(noref), ValidationError);
    CHECK_THROWS_AS(network_from_json_text("{not json"), ParseError);
}

TEST_CASE("73-bus export loads") {
    PowerNetwork net = load_network(data_path("rts73.json"));
    CHECK(net.bus_count() == 73);
    CHECK(net.horizon_T == 8);
}

TEST_CASE("default costs fill only unset fields") {
    PowerNetwork net;
    net.horizon_T = 2;
    net.buses = {{"b1", true, -1.0}};
    net.generators = {{"gw", "b1", 0, 10, -1.0, FuelType::Wind},
                      {"gt", "b1", 0, 10, -1.0, FuelType::Thermal},
                      {"gn", "b1", 0, 10, -1.0, FuelType::Nuclear},
                      {"gx", "b1", 0, 10, 7.0, FuelType::Thermal}};
    net.lines = {};
    net.loads = {{"d1", "b1", {1, 1}, -1.0}};
    net.finalize();
    PowerNetwork filled = default_costs(net);
    CHECK(filled.generators[0].damage_cost == doctest::Approx(50.0));
    CHECK(filled.generators[1].damage_cost == doctest::Approx(1000.0));
    CHECK(filled.generators[2].damage_cost == doctest::Approx(2500.0));
    CHECK(filled.generators[3].damage_cost == doctest::Approx(7.0));
    CHECK(filled.buses[0].damage_cost == doctest::Approx(50.0));
    CHECK(filled.loads[0].priority == doctest::Approx(50.0));

    SUBCASE("line damage cost is 0.285 per km") {
        PowerNetwork net2 = wgtest::toy3();
        PowerNetwork f2 = default_costs(net2);
        CHECK(f2.lines[0].damage_cost == doctest::Approx(28.5));  // 100 km
        CHECK(f2.lines[1].damage_cost == doctest::Approx(14.25));
    }

    SUBCASE("idempotent") {
        PowerNetwork twice = default_costs(default_costs(net));
        PowerNetwork once = default_costs(net);
        CHECK(network_to_json_text(twice) == network_to_json_text(once));
    }
}

TEST_CASE("incidence returns the connected subsets") {
    PowerNetwork net = wgtest::toy3();
    const auto& inc1 = net.incidence("1");
    CHECK(inc1.loads.empty());
    CHECK(inc1.generators == std::vector<int>{0});
    CHECK(inc1.lines == std::vector<int>{0, 1});
    const auto& inc2 = net.incidence("2");
    CHECK(inc2.loads == std::vector<int>{0});
    CHECK(inc2.generators.empty());
    CHECK(inc2.lines == std::vector<int>{0});
    const auto& inc3 = net.incidence("3");
    CHECK(inc3.loads == std::vector<int>{1});
    CHECK(inc3.lines == std::vector<int>{1});
    CHECK_THROWS_AS(net.incidence("nope"), UnknownBusError);

    SUBCASE("every generator sits at exactly one bus, every line at two") {
        PowerNetwork big = load_network(data_path("case14.json"));
        int gens = 0, line_slots = 0;
        for (int b = 0; b < big.bus_count(); ++b) {
            gens += static_cast<int>(big.incidence(b).generators.size());
            line_slots += static_cast<int>(big.incidence(b).lines.size());
        }
        CHECK(gens == big.generator_count());
        CHECK(line_slots == 2 * big.line_count());
    }
}

TEST_CASE("network JSON round-trip is lossless") {
    PowerNetwork net = default_costs(wgtest::toy3());
    std::string text = network_to_json_text(net);
    PowerNetwork back = network_from_json_text(text);
    CHECK(network_to_json_text(back) == text);
}
