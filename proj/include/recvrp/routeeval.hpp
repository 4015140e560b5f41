#pragma once

#include <map>
#include <string>
#include <vector>

#include "recvrp/instance.hpp"
#include "recvrp/stochmath.hpp"

namespace recvrp {

// A closed tour: starts and ends at the same depot, interior nodes are
// customers and stations.
struct Route {
  int vehicle_id = 0;
  std::vector<NodeId> nodes;

  NodeId depot() const { return nodes.front(); }
};

// Charging durations keyed by position along the route. Positions not
// present charge nothing; only station positions may appear.
struct ChargingPlan {
  std::map<int, double> tau;

  double total() const {
    double t = 0.0;
    for (const auto& [pos, v] : tau) t += v;
    return t;
  }
};

struct SocEntry {
  double enter_mu = 0.0;
  double exit_mu = 0.0;
  double var = 0.0;           // accumulated energy variance
  double robust_enter = 0.0;  // enter_mu - quantile(p_e) * sqrt(var)
};

struct SocProfile {
  std::vector<SocEntry> at;  // one entry per route position
};

struct EnergyCheck {
  bool feasible = true;
  int first_violation = -1;  // route position, -1 when feasible
};

struct RouteCost {
  NormalSummary time;   // mu includes charging time
  double robust = 0.0;  // mu + quantile(p_t) * sigma
};

struct CostReport {
  std::vector<RouteCost> per_route;
  double per_route_sum = 0.0;  // sum of per-route robust costs (reporting default)
  NormalSummary global;        // pooled mean/variance over all routes
  double global_robust = 0.0;  // single quantile over the pooled variance
  double mean_total = 0.0;
};

struct Solution {
  std::string instance_name;
  std::vector<Route> routes;
  std::vector<ChargingPlan> plans;
  CostReport cost;
};

struct Violation {
  enum class Code {
    RouteStructure,
    DepotRouteCount,
    CustomerUnvisited,
    CustomerRepeated,
    StationRepeated,
    NMaxExceeded,
    CapacityExceeded,
    ChargingCap,
    TauInvalid,
    EnergyInfeasible,
  };
  Code code;
  int route = -1;     // index into Solution::routes, -1 for global checks
  int position = -1;  // position within the route when it applies
  NodeId node = -1;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
};

// Throws ValidationError when the route breaks a structural invariant:
// closed at one depot, nonempty interior of customers/stations only, no
// repeated node, customer count within n_max.
void validate_route_structure(const Route& route, const Instance& inst);

// Mean SoC, accumulated energy variance and the robust entry bound at every
// position. Throws PlanError when a plan overcharges past soc_max.
SocProfile propagate_soc(const Route& route, const ChargingPlan& plan, const Instance& inst);

// True iff robust_enter >= soc_min at every position including the final
// depot entry.
EnergyCheck check_energy_feasible(const SocProfile& profile, const Instance& inst);

// Minimal total charging time subject to the robust SoC constraint and the
// battery cap: a forward pass buys at each station just enough to reach the
// next charging opportunity. Throws InfeasibleRoute when no plan exists.
ChargingPlan optimize_charging(const Route& route, const Instance& inst);

// Tour time distribution and robust cost: mu sums charging and edge means,
// var sums squared edge sigmas (left fold in route order).
RouteCost tour_time(const Route& route, const ChargingPlan& plan, const Instance& inst);

// Fills a CostReport for a set of routes: both the pooled-variance global
// aggregate and the sum of per-route robust costs.
CostReport solution_cost(const Solution& sol, const Instance& inst);

// Structural and stochastic feasibility of a full solution. Never throws on
// infeasible input; findings come back as a violation list.
FeasibilityReport check_solution(const Solution& sol, const Instance& inst);

std::string violation_text(const Violation& v);

// Solution text document (version tagged, decimals round-trip exact).
std::string save_solution(const Solution& sol);
Solution load_solution(const std::string& text);
Solution load_solution_file(const std::string& path);
void save_solution_file(const Solution& sol, const std::string& path);

}  // namespace recvrp
