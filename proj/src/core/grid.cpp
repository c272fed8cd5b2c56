#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wildgrid {

using nlohmann::json;

FuelType fuel_type_from_string(const std::string& s) {
    if (s == "wind") return FuelType::Wind;
    if (s == "thermal") return FuelType::Thermal;
    if (s == "nuclear") return FuelType::Nuclear;
    if (s == "other") return FuelType::Other;
    throw ParseError("unknown fuel type: " + s);
}

std::string to_string(FuelType f) {
    switch (f) {
        case FuelType::Wind: return "wind";
        case FuelType::Thermal: return "thermal";
        case FuelType::Nuclear: return "nuclear";
        case FuelType::Other: return "other";
    }
    return "other";
}

const std::string& PowerNetwork::component_id(int ci) const {
    if (ci < bus_count()) return buses[ci].id;
    ci -= bus_count();
    if (ci < generator_count()) return generators[ci].id;
    return lines[ci - generator_count()].id;
}

std::optional<int> PowerNetwork::component_index(const std::string& id) const {
    auto it = component_index_.find(id);
    if (it == component_index_.end()) return std::nullopt;
    return it->second;
}

double PowerNetwork::component_damage_cost(int ci) const {
    double c = -1.0;
    if (ci < bus_count()) {
        c = buses[ci].damage_cost;
    } else if (component_is_generator(ci)) {
        c = generators[ci - bus_count()].damage_cost;
    } else {
        c = lines[ci - bus_count() - generator_count()].damage_cost;
    }
    return c < 0.0 ? 0.0 : c;
}

int PowerNetwork::bus_index_of(const std::string& id) const {
    auto it = bus_index_.find(id);
    if (it == bus_index_.end()) throw UnknownBusError("unknown bus: " + id);
    return it->second;
}

const PowerNetwork::BusIncidence& PowerNetwork::incidence(const std::string& bus_id) const {
    return incidence_[bus_index_of(bus_id)];
}

void PowerNetwork::finalize() {
    if (horizon_T < 1) throw ValidationError("horizon_T must be >= 1");
    if (big_m_angle <= 0.0 || angle_bound <= 0.0)
        throw ValidationError("angle bounds must be positive");

    bus_index_.clear();
    component_index_.clear();

    std::set<std::string> all_ids;
    auto claim_id = [&](const std::string& id, const char* kind) {
        if (id.empty()) throw ValidationError(std::string(kind) + " with empty id");
        if (!all_ids.insert(id).second) throw ValidationError("duplicate id: " + id);
    };

    reference_bus_ = -1;
    for (int b = 0; b < bus_count(); ++b) {
        claim_id(buses[b].id, "bus");
        bus_index_[buses[b].id] = b;
        component_index_[buses[b].id] = component_of_bus(b);
        if (buses[b].is_reference) {
            if (reference_bus_ >= 0)
                throw ValidationError("more than one reference bus");
            reference_bus_ = b;
        }
    }
    if (reference_bus_ < 0) throw ValidationError("no reference bus");

    incidence_.assign(bus_count(), BusIncidence{});

    for (int g = 0; g < generator_count(); ++g) {
        const Generator& gen = generators[g];
        claim_id(gen.id, "generator");
        component_index_[gen.id] = component_of_generator(g);
        auto it = bus_index_.find(gen.bus);
        if (it == bus_index_.end())
            throw ValidationError("generator " + gen.id + " references unknown bus " + gen.bus);
        if (gen.p_min < 0.0 || gen.p_min > gen.p_max)
            throw ValidationError("generator " + gen.id + " violates 0 <= p_min <= p_max");
        incidence_[it->second].generators.push_back(g);
    }

    for (int l = 0; l < line_count(); ++l) {
        const Line& ln = lines[l];
        claim_id(ln.id, "line");
        component_index_[ln.id] = component_of_line(l);
        if (ln.from_bus == ln.to_bus)
            throw ValidationError("line " + ln.id + " connects a bus to itself");
        if (ln.susceptance_mag <= 0.0)
            throw ValidationError("line " + ln.id + " needs susceptance_mag > 0");
        if (ln.thermal_limit <= 0.0)
            throw ValidationError("line " + ln.id + " needs thermal_limit > 0");
        auto fit = bus_index_.find(ln.from_bus);
        auto tit = bus_index_.find(ln.to_bus);
        if (fit == bus_index_.end())
            throw ValidationError("line " + ln.id + " references unknown bus " + ln.from_bus);
        if (tit == bus_index_.end())
            throw ValidationError("line " + ln.id + " references unknown bus " + ln.to_bus);
        incidence_[fit->second].lines.push_back(l);
        incidence_[tit->second].lines.push_back(l);
    }

    for (int d = 0; d < load_count(); ++d) {
        const Load& ld = loads[d];
        claim_id(ld.id, "load");
        auto it = bus_index_.find(ld.bus);
        if (it == bus_index_.end())
            throw ValidationError("load " + ld.id + " references unknown bus " + ld.bus);
        if (static_cast<int>(ld.demand_by_period.size()) != horizon_T)
            throw ValidationError("load " + ld.id + " demand vector length != horizon_T");
        for (double v : ld.demand_by_period)
            if (v < 0.0) throw ValidationError("load " + ld.id + " has negative demand");
        // priority < 0 means unset (default_costs fills it); 0 is invalid
        if (ld.priority == 0.0)
            throw ValidationError("load " + ld.id + " priority must be > 0");
        incidence_[it->second].loads.push_back(d);
    }
}

namespace {

double opt_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<double>();
}

PowerNetwork network_from_json(const json& j) {
    PowerNetwork net;
    try {
        net.horizon_T = j.at("horizon_T").get<int>();
        net.big_m_angle = opt_number(j, "big_m_angle", 2.0 * kPi);
        net.angle_bound = opt_number(j, "angle_bound", kPi);
        net.base_mva = opt_number(j, "base_mva", 100.0);
        for (const json& jb : j.at("buses")) {
            Bus b;
            b.id = jb.at("id").get<std::string>();
            b.is_reference = jb.value("is_reference", false);
            b.damage_cost = opt_number(jb, "damage_cost", -1.0);
            net.buses.push_back(std::move(b));
        }
        for (const json& jg : j.value("generators", json::array())) {
            Generator g;
            g.id = jg.at("id").get<std::string>();
            g.bus = jg.at("bus").get<std::string>();
            g.p_min = jg.value("p_min", 0.0);
            g.p_max = jg.at("p_max").get<double>();
            g.damage_cost = opt_number(jg, "damage_cost", -1.0);
            g.fuel = fuel_type_from_string(jg.value("fuel", "other"));
            net.generators.push_back(std::move(g));
        }
        for (const json& jl : j.value("lines", json::array())) {
            Line l;
            l.id = jl.at("id").get<std::string>();
            l.from_bus = jl.at("from_bus").get<std::string>();
            l.to_bus = jl.at("to_bus").get<std::string>();
            l.susceptance_mag = jl.at("susceptance_mag").get<double>();
            l.thermal_limit = jl.at("thermal_limit").get<double>();
            l.length_km = jl.value("length", 0.0);
            l.damage_cost = opt_number(jl, "damage_cost", -1.0);
            net.lines.push_back(std::move(l));
        }
        for (const json& jd : j.value("loads", json::array())) {
            Load d;
            d.id = jd.at("id").get<std::string>();
            d.bus = jd.at("bus").get<std::string>();
            d.demand_by_period = jd.at("demand_by_period").get<std::vector<double>>();
            d.priority = opt_number(jd, "priority", -1.0);
            net.loads.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
    net.finalize();
    return net;
}

}  // namespace

PowerNetwork network_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
    return network_from_json(j);
}

PowerNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return network_from_json_text(ss.str());
}

std::string network_to_json_text(const PowerNetwork& net) {
    json j;
    j["horizon_T"] = net.horizon_T;
    j["big_m_angle"] = net.big_m_angle;
    j["angle_bound"] = net.angle_bound;
    j["base_mva"] = net.base_mva;
    j["buses"] = json::array();
    for (const Bus& b : net.buses) {
        json jb{{"id", b.id}, {"is_reference", b.is_reference}};
        if (b.damage_cost >= 0.0) jb["damage_cost"] = b.damage_cost;
        j["buses"].push_back(jb);
    }
    j["generators"] = json::array();
    for (const Generator& g : net.generators) {
        json jg{{"id", g.id}, {"bus", g.bus},      {"p_min", g.p_min},
                {"p_max", g.p_max}, {"fuel", to_string(g.fuel)}};
        if (g.damage_cost >= 0.0) jg["damage_cost"] = g.damage_cost;
        j["generators"].push_back(jg);
    }
    j["lines"] = json::array();
    for (const Line& l : net.lines) {
        json jl{{"id", l.id},
                {"from_bus", l.from_bus},
                {"to_bus", l.to_bus},
                {"susceptance_mag", l.susceptance_mag},
                {"thermal_limit", l.thermal_limit},
                {"length", l.length_km}};
        if (l.damage_cost >= 0.0) jl["damage_cost"] = l.damage_cost;
        j["lines"].push_back(jl);
    }
    j["loads"] = json::array();
    for (const Load& d : net.loads) {
        json jd{{"id", d.id}, {"bus", d.bus}, {"demand_by_period", d.demand_by_period}};
        if (d.priority >= 0.0) jd["priority"] = d.priority;
        j["loads"].push_back(jd);
    }
    return j.dump(2);
}

void save_network(const PowerNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write network file: " + path);
    out << network_to_json_text(net) << "\n";
}

PowerNetwork default_costs(PowerNetwork net) {
    for (Bus& b : net.buses)
        if (b.damage_cost < 0.0) b.damage_cost = 50.0;
    for (Generator& g : net.generators) {
        if (g.damage_cost >= 0.0) continue;
        switch (g.fuel) {
            case FuelType::Wind: g.damage_cost = 50.0; break;
            case FuelType::Nuclear: g.damage_cost = 2500.0; break;
            case FuelType::Thermal:
            case FuelType::Other: g.damage_cost = 1000.0; break;
        }
    }
    for (Line& l : net.lines)
        if (l.damage_cost < 0.0) l.damage_cost = 0.285 * l.length_km;
    for (Load& d : net.loads) {
        if (d.priority < 0.0) d.priority = 50.0;
        d.priority = std::clamp(d.priority, 50.0, 1000.0);
    }
    return net;
}

}  // namespace wildgrid
