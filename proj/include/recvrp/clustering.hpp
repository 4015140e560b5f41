#pragma once

#include <string>
#include <vector>

#include "recvrp/instance.hpp"

namespace recvrp {

enum class CostType { F1, F2, F3 };

CostType cost_type_from_string(const std::string& s);
std::string cost_type_name(CostType t);

// Elementwise edge cost blending robust time and robust energy:
// z = t_mu + quantile(p_t) * t_sigma + (e_mu + quantile(p_e) * e_sigma) / R.
struct CostMatrixZ {
  Eigen::MatrixXd z;
  double r_param = 1.0;
};

// One vehicle's share of the customers, anchored at its depot. Stations are
// filled in by attach_stations.
struct Group {
  NodeId depot = 0;
  std::vector<NodeId> customers;  // ascending
  std::vector<NodeId> stations;   // ascending, virtual copies

  double demand(const Instance& inst) const;
  std::vector<NodeId> member_nodes() const;  // depot + customers, ascending
  Eigen::MatrixXd cost_submatrix(const CostMatrixZ& z) const;
};

struct Clustering {
  std::vector<Group> groups;
  CostType cost_type = CostType::F3;
  double total_cost = 0.0;
};

// R defaults to the charging rate when not given.
CostMatrixZ build_cost_matrix(const Instance& inst, double r_param);
CostMatrixZ build_cost_matrix(const Instance& inst);

// Scalar cost of one group's principal submatrix of Z (depot + customers):
// F1 is the dominant eigenvalue of the symmetrized submatrix times the group
// size (power iteration with a dense fallback), F2 the Frobenius norm, F3
// the sum of absolute eigenvalues of the symmetrized submatrix.
double group_cost(const Group& g, const CostMatrixZ& z, CostType type);

// Greedy constrained clustering: seed one group per vehicle at its depot,
// insert customers by ascending resulting cost, then improve with
// relocations, 1-1 swaps and 2-1 swaps until the total cost stops falling.
Clustering cluster(const Instance& inst, const CostMatrixZ& z, CostType type);

// Lower-level entry reused for subgroup splitting: explicit depot anchors,
// customer pool and constraints.
struct ClusterSpec {
  std::vector<NodeId> group_depots;  // one entry per group
  std::vector<NodeId> customers;
  std::vector<double> demands;  // aligned with customers
  double capacity = 0.0;
  int n_max = 0;
};
std::vector<Group> cluster_nodes(const ClusterSpec& spec, const CostMatrixZ& z, CostType type);

// Adds, for every member node of every group, the cheapest physical station
// (ties to the lowest id). Virtual copies are dealt to the groups that want
// the same physical station in round-robin group order; a station wanted by
// a single group contributes all of its copies to that group.
Clustering attach_stations(Clustering clu, const Instance& inst, const CostMatrixZ& z);

// Text dump, one line per group, machine-checkable.
std::string save_clustering(const Clustering& clu);

}  // namespace recvrp
