#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace wildgrid {

inline constexpr double kPi = 3.14159265358979323846;

enum class FuelType { Wind, Thermal, Nuclear, Other };

FuelType fuel_type_from_string(const std::string& s);
std::string to_string(FuelType f);

struct Bus {
    std::string id;
    bool is_reference = false;
    double damage_cost = -1.0;  // < 0 means unset
};

struct Generator {
    std::string id;
    std::string bus;
    double p_min = 0.0;
    double p_max = 0.0;
    double damage_cost = -1.0;
    FuelType fuel = FuelType::Other;
};

struct Line {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double susceptance_mag = 0.0;  // b_ij > 0
    double thermal_limit = 0.0;    // MW
    double length_km = 0.0;
    double damage_cost = -1.0;
};

struct Load {
    std::string id;
    std::string bus;
    std::vector<double> demand_by_period;  // length = horizon_T, MW
    double priority = -1.0;                // cost per unit shed, < 0 means unset
};

// Switchable components are buses, generators and lines, indexed in one flat
// component space: [0, B) buses, [B, B+G) generators, [B+G, B+G+L) lines.
// The shutoff state vectors and cut slopes live in this space.
struct PowerNetwork {
    int horizon_T = 0;
    double big_m_angle = 2.0 * kPi;  // angle-difference big-M in the flow pair
    double angle_bound = kPi;        // per-bus |theta| bound
    double base_mva = 100.0;         // converts per-unit susceptance to MW flows

    std::vector<Bus> buses;
    std::vector<Generator> generators;
    std::vector<Line> lines;
    std::vector<Load> loads;

    struct BusIncidence {
        std::vector<int> loads;
        std::vector<int> generators;
        std::vector<int> lines;  // lines with either endpoint at this bus
    };

    int bus_count() const { return static_cast<int>(buses.size()); }
    int generator_count() const { return static_cast<int>(generators.size()); }
    int line_count() const { return static_cast<int>(lines.size()); }
    int load_count() const { return static_cast<int>(loads.size()); }
    int component_count() const { return bus_count() + generator_count() + line_count(); }

    int component_of_bus(int b) const { return b; }
    int component_of_generator(int g) const { return bus_count() + g; }
    int component_of_line(int l) const { return bus_count() + generator_count() + l; }
    bool component_is_bus(int ci) const { return ci < bus_count(); }
    bool component_is_generator(int ci) const {
        return ci >= bus_count() && ci < bus_count() + generator_count();
    }

    const std::string& component_id(int ci) const;
    std::optional<int> component_index(const std::string& id) const;
    double component_damage_cost(int ci) const;

    // MW flow per radian of angle difference on an energized line:
    // P = line_coeff * (theta_to - theta_from).
    double line_coeff(int l) const { return base_mva * lines[l].susceptance_mag; }

    int bus_index_of(const std::string& id) const;  // throws UnknownBusError
    int reference_bus() const { return reference_bus_; }

    // Subsets D_i, G_i, L_i for one bus.
    const BusIncidence& incidence(int bus) const { return incidence_[bus]; }
    const BusIncidence& incidence(const std::string& bus_id) const;

    // Rebuilds index maps and checks structural invariants; throws
    // ValidationError. Called by load_network and after programmatic edits.
    void finalize();

  private:
    std::map<std::string, int> bus_index_;
    std::map<std::string, int> component_index_;
    std::vector<BusIncidence> incidence_;
    int reference_bus_ = -1;
};

PowerNetwork load_network(const std::string& path);
PowerNetwork network_from_json_text(const std::string& text);
std::string network_to_json_text(const PowerNetwork& net);
void save_network(const PowerNetwork& net, const std::string& path);

// Fills unset damage costs (wind 50, thermal 1000, nuclear 2500, bus 50,
// line 0.285*length) and unset priorities (50, clamped into [50, 1000]).
// Explicit damage costs are never touched. Idempotent.
PowerNetwork default_costs(PowerNetwork net);

}  // namespace wildgrid
