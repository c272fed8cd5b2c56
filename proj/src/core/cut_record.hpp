#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace wildgrid {

enum class CutFamily { BC, SBC, LC, SMC };
enum class ZDomain { Binary, Interval };

std::string to_string(CutFamily f);
std::string to_string(ZDomain z);
CutFamily cut_family_from_string(const std::string& s);
ZDomain z_domain_from_string(const std::string& s);

// Linear lower approximation of a node value function:
//   V_owner >= slope'(z_{tau-1} - anchor) + intercept
struct CutRecord {
    std::string owner;           // node whose value function this bounds
    std::vector<double> slope;   // lambda, one entry per component
    double intercept = 0.0;      // v
    std::vector<double> anchor;  // zhat, binary
    CutFamily family = CutFamily::BC;
    ZDomain z_domain = ZDomain::Binary;
    int iteration = 0;
    bool tight = true;     // false when an oracle budget truncated the dual search
    int oracle_calls = 0;  // inner solves spent generating the cut
    double wall_time = 0.0;
};

// Cut store keyed by owner node, with exact-coefficient dedup. Cuts are never
// deleted (monotone lower bounds depend on pool growth).
class CutPool {
  public:
    // false when an identical cut (owner, slope, intercept, anchor) is present
    bool add(CutRecord cut);
    const std::vector<CutRecord>& for_node(const std::string& owner) const;
    int total() const { return total_; }
    const std::map<std::string, std::vector<CutRecord>>& by_owner() const { return by_owner_; }

  private:
    std::map<std::string, std::vector<CutRecord>> by_owner_;
    std::set<std::string> seen_;
    int total_ = 0;
};

}  // namespace wildgrid
