#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "recvrp/errors.hpp"

namespace recvrp {

using NodeId = std::int32_t;

enum class NodeKind { Depot, Customer, Station };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::Customer;
  std::optional<Vec2> position;  // absent when only matrices are given
  double demand = 0.0;           // > 0 only for customers
  int vehicles_at = 0;           // > 0 only for depots
};

// Four N x N matrices over the full node list (virtual station copies
// included). Sigmas are standard deviations, not variances. Diagonals are 0.
struct EdgeMatrices {
  Eigen::MatrixXd t_mu;
  Eigen::MatrixXd t_sigma;
  Eigen::MatrixXd e_mu;
  Eigen::MatrixXd e_sigma;
};

struct VehicleSpec {
  double capacity = 0.0;     // Q
  double soc_max = 0.0;
  double soc_min = 0.0;
  double soc_start = 0.0;
  int n_max = 1;             // max customers per tour
  double charge_rate = 1.0;  // energy per time unit
};

struct RobustnessParams {
  double p_e = 0.999;  // in (0.5, 1)
  double p_t = 0.9;    // in [0.5, 1)
};

// Relative sigma specification: a fixed fraction (lo == hi) or a uniform
// range, both within [0, 1).
struct RelSigma {
  double lo = 0.0;
  double hi = 0.0;

  static RelSigma fixed(double f) { return {f, f}; }
  static RelSigma range(double lo, double hi) { return {lo, hi}; }
};

// Problem data. Virtual station copies are materialized at construction:
// the node list holds `physical_count` original nodes followed, when
// station_copies > 1, by (station_copies - 1) extra nodes per physical
// station, grouped per station in ascending station id order.
struct Instance {
  std::string name;
  std::vector<Node> nodes;
  EdgeMatrices edges;
  VehicleSpec vehicle;
  RobustnessParams robustness;
  int station_copies = 1;
  NodeId physical_count = 0;
  std::optional<double> reference_cost;  // best known value, when a source provides one

  NodeId size() const { return static_cast<NodeId>(nodes.size()); }
  bool is_depot(NodeId i) const { return nodes[i].kind == NodeKind::Depot; }
  bool is_customer(NodeId i) const { return nodes[i].kind == NodeKind::Customer; }
  bool is_station(NodeId i) const { return nodes[i].kind == NodeKind::Station; }

  std::vector<NodeId> depot_ids() const;
  std::vector<NodeId> customer_ids() const;
  std::vector<NodeId> station_ids() const;           // copies included
  std::vector<NodeId> physical_station_ids() const;  // originals only
  NodeId physical_station_of(NodeId id) const;       // identity for originals
  std::vector<NodeId> copies_of_station(NodeId physical) const;

  int total_vehicles() const;
  double total_demand() const;
  // False when the summed demand exceeds the fleet capacity M * Q; such an
  // instance is kept but flagged.
  bool is_load_feasible() const;

  // Throws ValidationError when a structural invariant is broken.
  void validate() const;
};

// Parses the benchmark text format: a key/value header (DIMENSION, STATIONS,
// CAPACITY, ENERGY_CAPACITY, ENERGY_CONSUMPTION, VEHICLES, OPTIMAL_VALUE)
// followed by NODE_COORD_SECTION, DEMAND_SECTION, STATIONS_COORD_SECTION and
// DEPOT_SECTION. Travel times are Euclidean distances, energy is
// ENERGY_CONSUMPTION times distance, sigmas are zero.
Instance parse_benchmark(std::istream& in, int station_copies = 2);
Instance parse_benchmark(const std::string& text, int station_copies = 2);

// Returns a copy with t_sigma/e_sigma redrawn as rel * mu, where rel is
// drawn per ordered physical edge (one draw for time, one for energy) and
// mirrored onto station copies. Deterministic in the seed.
Instance make_stochastic(const Instance& inst, RelSigma rel, std::uint64_t seed);

// Seeded random instance on a 100 x 100 map: demands U[5,20], Q = 100,
// e_mu = 1.85 * distance, soc_max = soc_start = 100, charge rate 3, 10% of
// nodes (rounded up, at least 1) are stations, sigmas drawn in [0.05, 0.30].
Instance generate_random(int n_nodes, const std::vector<int>& depot_vehicle_layout,
                         std::uint64_t seed, int station_copies = 2);

// Native text document, version tagged, decimal round-trip exact.
std::string save_instance(const Instance& inst);
Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& inst, const std::string& path);

// Loads either the native format or the benchmark format, sniffing the
// leading header line.
Instance load_any_instance_file(const std::string& path, int station_copies = 2);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);
double parse_double(const std::string& token);

}  // namespace recvrp
