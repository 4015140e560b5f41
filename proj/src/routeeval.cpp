#include "recvrp/routeeval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace recvrp {

namespace {
constexpr double kSocTol = 1e-9;
}

void validate_route_structure(const Route& route, const Instance& inst) {
  const auto& seq = route.nodes;
  if (seq.size() < 3) throw ValidationError("route needs at least one interior node");
  for (NodeId id : seq)
    if (id < 0 || id >= inst.size()) throw ValidationError("route references unknown node");
  if (seq.front() != seq.back()) throw ValidationError("route must end at its start depot");
  if (!inst.is_depot(seq.front())) throw ValidationError("route must start at a depot");
  std::set<NodeId> seen;
  int customers = 0;
  for (std::size_t k = 1; k + 1 < seq.size(); ++k) {
    const NodeId id = seq[k];
    if (inst.is_depot(id)) throw ValidationError("depot in route interior");
    if (!seen.insert(id).second) throw ValidationError("node repeated within route");
    if (inst.is_customer(id)) ++customers;
  }
  if (customers > inst.vehicle.n_max)
    throw ValidationError("route exceeds n_max customers");
}

SocProfile propagate_soc(const Route& route, const ChargingPlan& plan, const Instance& inst) {
  validate_route_structure(route, inst);
  const double z_e = quantile(inst.robustness.p_e);
  const double rate = inst.vehicle.charge_rate;
  SocProfile prof;
  prof.at.resize(route.nodes.size());

  double mu = inst.vehicle.soc_start;
  double var = 0.0;
  prof.at[0] = {mu, mu, 0.0, mu};
  for (std::size_t k = 1; k < route.nodes.size(); ++k) {
    const NodeId from = route.nodes[k - 1];
    const NodeId to = route.nodes[k];
    mu -= inst.edges.e_mu(from, to);
    const double s = inst.edges.e_sigma(from, to);
    var += s * s;
    SocEntry& e = prof.at[k];
    e.enter_mu = mu;
    e.var = var;
    e.robust_enter = mu - z_e * std::sqrt(var);
    e.exit_mu = mu;
    if (auto it = plan.tau.find(static_cast<int>(k)); it != plan.tau.end()) {
      if (!inst.is_station(route.nodes[k]))
        throw PlanError("charging time at a non-station position");
      if (it->second < 0) throw PlanError("negative charging time");
      e.exit_mu = mu + it->second * rate;
      if (e.exit_mu > inst.vehicle.soc_max + kSocTol)
        throw PlanError("charging past soc_max");
      mu = e.exit_mu;
    }
  }
  return prof;
}

EnergyCheck check_energy_feasible(const SocProfile& profile, const Instance& inst) {
  for (std::size_t k = 0; k < profile.at.size(); ++k) {
    if (profile.at[k].robust_enter < inst.vehicle.soc_min - kSocTol)
      return {false, static_cast<int>(k)};
  }
  return {true, -1};
}

ChargingPlan optimize_charging(const Route& route, const Instance& inst) {
  validate_route_structure(route, inst);
  const auto& seq = route.nodes;
  const double z_e = quantile(inst.robustness.p_e);
  const double soc_min = inst.vehicle.soc_min;
  const double soc_max = inst.vehicle.soc_max;
  const double rate = inst.vehicle.charge_rate;
  const std::size_t n = seq.size();

  // Robust entry SoC with no charging at all.
  std::vector<double> base(n), cum_mu(n);
  {
    double mu = inst.vehicle.soc_start, var = 0.0;
    base[0] = mu;
    cum_mu[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      mu -= inst.edges.e_mu(seq[k - 1], seq[k]);
      const double s = inst.edges.e_sigma(seq[k - 1], seq[k]);
      var += s * s;
      cum_mu[k] = inst.vehicle.soc_start - mu;
      base[k] = mu - z_e * std::sqrt(var);
    }
  }

  std::vector<std::size_t> stations;
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (inst.is_station(seq[k])) stations.push_back(k);

  ChargingPlan plan;
  double bought = 0.0;  // energy purchased so far
  std::size_t first_station = stations.empty() ? n : stations.front();
  for (std::size_t k = 1; k <= (stations.empty() ? n - 1 : first_station); ++k) {
    if (base[k] < soc_min - kSocTol)
      throw InfeasibleRoute("robust SoC drops below minimum before any station");
  }
  for (std::size_t si = 0; si < stations.size(); ++si) {
    const std::size_t s = stations[si];
    const std::size_t seg_end = (si + 1 < stations.size()) ? stations[si + 1] : n - 1;
    double need = 0.0;
    for (std::size_t k = s + 1; k <= seg_end; ++k)
      need = std::max(need, soc_min - (base[k] + bought));
    if (need > 0.0) {
      const double enter_mu = inst.vehicle.soc_start - cum_mu[s] + bought;
      const double headroom = soc_max - enter_mu;
      if (need > headroom + kSocTol)
        throw InfeasibleRoute("required charge exceeds battery headroom at station");
      plan.tau[static_cast<int>(s)] = need / rate;
      bought += need;
    }
  }
  return plan;
}

RouteCost tour_time(const Route& route, const ChargingPlan& plan, const Instance& inst) {
  NormalSummary t;
  for (std::size_t k = 1; k < route.nodes.size(); ++k) {
    const NodeId a = route.nodes[k - 1];
    const NodeId b = route.nodes[k];
    const double s = inst.edges.t_sigma(a, b);
    t = sum(t, {inst.edges.t_mu(a, b), s * s});
  }
  t.mu += plan.total();
  return {t, robust_upper(t, inst.robustness.p_t)};
}

CostReport solution_cost(const Solution& sol, const Instance& inst) {
  CostReport rep;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const ChargingPlan empty;
    const ChargingPlan& plan = r < sol.plans.size() ? sol.plans[r] : empty;
    RouteCost rc = tour_time(sol.routes[r], plan, inst);
    rep.per_route.push_back(rc);
    rep.per_route_sum += rc.robust;
    rep.global = sum(rep.global, rc.time);
  }
  rep.global_robust = robust_upper(rep.global, inst.robustness.p_t);
  rep.mean_total = rep.global.mu;
  return rep;
}

FeasibilityReport check_solution(const Solution& sol, const Instance& inst) {
  FeasibilityReport rep;
  auto add = [&](Violation::Code code, int route, int pos, NodeId node, std::string detail) {
    rep.violations.push_back({code, route, pos, node, std::move(detail)});
  };

  std::map<NodeId, int> depot_routes;
  std::map<NodeId, int> customer_visits;
  std::map<NodeId, int> station_visits;

  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const auto& seq = sol.routes[r].nodes;
    bool structural_ok = true;
    try {
      validate_route_structure(sol.routes[r], inst);
    } catch (const ValidationError& e) {
      add(Violation::Code::RouteStructure, static_cast<int>(r), -1, -1, e.what());
      structural_ok = false;
    }
    if (!structural_ok) continue;

    depot_routes[seq.front()] += 1;
    double load = 0.0;
    int customers = 0;
    for (std::size_t k = 1; k + 1 < seq.size(); ++k) {
      const NodeId id = seq[k];
      if (inst.is_customer(id)) {
        customer_visits[id] += 1;
        load += inst.nodes[id].demand;
        ++customers;
      } else {
        station_visits[id] += 1;
      }
    }
    if (customers > inst.vehicle.n_max)
      add(Violation::Code::NMaxExceeded, static_cast<int>(r), -1, -1,
          "route visits " + std::to_string(customers) + " customers, n_max " +
              std::to_string(inst.vehicle.n_max));
    if (load > inst.vehicle.capacity + 1e-9)
      add(Violation::Code::CapacityExceeded, static_cast<int>(r), -1, -1,
          "route load " + format_double(load) + " exceeds capacity " +
              format_double(inst.vehicle.capacity));

    const ChargingPlan empty;
    const ChargingPlan& plan = r < sol.plans.size() ? sol.plans[r] : empty;
    bool plan_ok = true;
    for (const auto& [pos, tau] : plan.tau) {
      if (tau < 0 || pos <= 0 || pos >= static_cast<int>(seq.size()) - 1 ||
          !inst.is_station(seq[pos])) {
        add(Violation::Code::TauInvalid, static_cast<int>(r), pos, -1,
            "invalid charging entry");
        plan_ok = false;
      }
    }
    if (plan_ok) {
      try {
        SocProfile prof = propagate_soc(sol.routes[r], plan, inst);
        EnergyCheck ec = check_energy_feasible(prof, inst);
        if (!ec.feasible)
          add(Violation::Code::EnergyInfeasible, static_cast<int>(r), ec.first_violation,
              seq[ec.first_violation], "robust SoC below minimum");
      } catch (const PlanError& e) {
        add(Violation::Code::ChargingCap, static_cast<int>(r), -1, -1, e.what());
      }
    }
  }

  for (NodeId d : inst.depot_ids()) {
    const int want = inst.nodes[d].vehicles_at;
    const int got = depot_routes.count(d) ? depot_routes[d] : 0;
    if (want != got)
      add(Violation::Code::DepotRouteCount, -1, -1, d,
          "depot " + std::to_string(d) + " has " + std::to_string(got) + " routes, expected " +
              std::to_string(want));
  }
  for (NodeId c : inst.customer_ids()) {
    const int got = customer_visits.count(c) ? customer_visits[c] : 0;
    if (got == 0)
      add(Violation::Code::CustomerUnvisited, -1, -1, c,
          "customer " + std::to_string(c) + " unvisited");
    else if (got > 1)
      add(Violation::Code::CustomerRepeated, -1, -1, c,
          "customer " + std::to_string(c) + " visited " + std::to_string(got) + " times");
  }
  for (const auto& [s, cnt] : station_visits) {
    if (cnt > 1)
      add(Violation::Code::StationRepeated, -1, -1, s,
          "station node " + std::to_string(s) + " entered " + std::to_string(cnt) + " times");
  }
  return rep;
}

std::string violation_text(const Violation& v) {
  std::ostringstream out;
  switch (v.code) {
    case Violation::Code::RouteStructure: out << "route-structure"; break;
    case Violation::Code::DepotRouteCount: out << "depot-route-count"; break;
    case Violation::Code::CustomerUnvisited: out << "customer unvisited"; break;
    case Violation::Code::CustomerRepeated: out << "customer repeated"; break;
    case Violation::Code::StationRepeated: out << "station repeated"; break;
    case Violation::Code::NMaxExceeded: out << "n_max exceeded"; break;
    case Violation::Code::CapacityExceeded: out << "capacity exceeded"; break;
    case Violation::Code::ChargingCap: out << "charging cap"; break;
    case Violation::Code::TauInvalid: out << "invalid tau"; break;
    case Violation::Code::EnergyInfeasible: out << "energy infeasible"; break;
  }
  if (v.route >= 0) out << " route " << v.route;
  if (v.position >= 0) out << " position " << v.position;
  out << ": " << v.detail;
  return out.str();
}

std::string save_solution(const Solution& sol) {
  std::ostringstream out;
  out << "recvrp-solution 1\n";
  out << "instance " << sol.instance_name << "\n";
  out << "routes " << sol.routes.size() << "\n";
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    out << "route " << r << " nodes";
    for (NodeId id : sol.routes[r].nodes) out << ' ' << id;
    out << "\n";
    out << "route " << r << " tau";
    if (r < sol.plans.size())
      for (const auto& [pos, tau] : sol.plans[r].tau)
        out << ' ' << pos << '=' << format_double(tau);
    out << "\n";
    if (r < sol.cost.per_route.size()) {
      const auto& rc = sol.cost.per_route[r];
      out << "route " << r << " cost " << format_double(rc.time.mu) << ' '
          << format_double(rc.time.var) << ' ' << format_double(rc.robust) << "\n";
    }
  }
  out << "total " << format_double(sol.cost.per_route_sum) << ' '
      << format_double(sol.cost.global.mu) << ' ' << format_double(sol.cost.global.var) << ' '
      << format_double(sol.cost.global_robust) << ' ' << format_double(sol.cost.mean_total)
      << "\n";
  out << "end\n";
  return out.str();
}

Solution load_solution(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty solution document");
  ++line_no;
  {
    std::istringstream ss(line);
    std::string tag;
    int version = 0;
    ss >> tag >> version;
    if (tag != "recvrp-solution") throw ParseError("not a recvrp solution document", 1);
    if (version != 1) throw ParseError("unsupported solution format version", 1);
  }
  Solution sol;
  bool saw_end = false;
  int declared_routes = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key.empty()) continue;
    if (key == "end") {
      saw_end = true;
      break;
    } else if (key == "instance") {
      std::string rest;
      std::getline(ss, rest);
      if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
      sol.instance_name = rest;
    } else if (key == "routes") {
      ss >> declared_routes;
      if (declared_routes < 0) throw ParseError("bad route count", line_no);
      sol.routes.resize(declared_routes);
      sol.plans.resize(declared_routes);
      sol.cost.per_route.resize(declared_routes);
      for (int r = 0; r < declared_routes; ++r) sol.routes[r].vehicle_id = r;
    } else if (key == "route") {
      int r = -1;
      std::string what;
      ss >> r >> what;
      if (r < 0 || r >= declared_routes) throw ParseError("route index out of range", line_no);
      if (what == "nodes") {
        NodeId id;
        while (ss >> id) sol.routes[r].nodes.push_back(id);
      } else if (what == "tau") {
        std::string tok;
        while (ss >> tok) {
          auto eq = tok.find('=');
          if (eq == std::string::npos) throw ParseError("bad tau entry", line_no);
          sol.plans[r].tau[static_cast<int>(parse_double(tok.substr(0, eq)))] =
              parse_double(tok.substr(eq + 1));
        }
      } else if (what == "cost") {
        std::string mu, var, robust;
        ss >> mu >> var >> robust;
        sol.cost.per_route[r] = {{parse_double(mu), parse_double(var)}, parse_double(robust)};
      } else {
        throw ParseError("unknown route attribute " + what, line_no);
      }
    } else if (key == "total") {
      std::string a, b, c, d, e;
      ss >> a >> b >> c >> d >> e;
      sol.cost.per_route_sum = parse_double(a);
      sol.cost.global = {parse_double(b), parse_double(c)};
      sol.cost.global_robust = parse_double(d);
      sol.cost.mean_total = parse_double(e);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  if (!saw_end) throw ParseError("missing end marker", line_no);
  if (declared_routes < 0) throw ParseError("missing routes line");
  for (const auto& r : sol.routes)
    if (r.nodes.empty()) throw ParseError("route without nodes");
  return sol;
}

Solution load_solution_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_solution(ss.str());
}

void save_solution_file(const Solution& sol, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << save_solution(sol);
}

}  // namespace recvrp
