#include "recvrp/clustering.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "recvrp/stochmath.hpp"

namespace recvrp {

namespace {
constexpr double kImproveEps = 1e-9;
constexpr int kMaxOuterIters = 50;
}

CostType cost_type_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (t == "f1") return CostType::F1;
  if (t == "f2") return CostType::F2;
  if (t == "f3") return CostType::F3;
  throw DomainError("unknown cost type '" + s + "' (expected F1, F2 or F3)");
}

std::string cost_type_name(CostType t) {
  switch (t) {
    case CostType::F1: return "F1";
    case CostType::F2: return "F2";
    case CostType::F3: return "F3";
  }
  return "?";
}

double Group::demand(const Instance& inst) const {
  double q = 0.0;
  for (NodeId c : customers) q += inst.nodes[c].demand;
  return q;
}

std::vector<NodeId> Group::member_nodes() const {
  std::vector<NodeId> out;
  out.reserve(customers.size() + 1);
  out.push_back(depot);
  out.insert(out.end(), customers.begin(), customers.end());
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd Group::cost_submatrix(const CostMatrixZ& z) const {
  const auto ids = member_nodes();
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = z.z(ids[i], ids[j]);
  return sub;
}

CostMatrixZ build_cost_matrix(const Instance& inst, double r_param) {
  if (!(r_param > 0)) throw DomainError("R must be positive");
  const double phi_t = quantile(inst.robustness.p_t);
  const double phi_e = quantile(inst.robustness.p_e);
  CostMatrixZ out;
  out.r_param = r_param;
  out.z = inst.edges.t_mu + phi_t * inst.edges.t_sigma +
          (inst.edges.e_mu + phi_e * inst.edges.e_sigma) / r_param;
  return out;
}

CostMatrixZ build_cost_matrix(const Instance& inst) {
  return build_cost_matrix(inst, inst.vehicle.charge_rate);
}

namespace {

// Dominant |eigenvalue| of a symmetric matrix by power iteration; falls back
// to the full spectrum when the iteration stalls.
double spectral_radius(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (n == 0) return 0.0;
  if (a.norm() == 0.0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  double lam_prev = std::numeric_limits<double>::infinity();
  const int max_iters = 10 * static_cast<int>(n);
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = a * v;
    const double lam = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (std::abs(lam - lam_prev) <= 1e-8 * std::max(1.0, std::abs(lam)))
      return std::abs(lam);
    lam_prev = lam;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double matrix_cost(const Eigen::MatrixXd& sub, CostType type) {
  switch (type) {
    case CostType::F2:
      return sub.norm();
    case CostType::F1: {
      const Eigen::MatrixXd sym = 0.5 * (sub + sub.transpose());
      return spectral_radius(sym) * static_cast<double>(sub.rows());
    }
    case CostType::F3: {
      const Eigen::MatrixXd sym = 0.5 * (sub + sub.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().sum();
    }
  }
  return 0.0;
}

}  // namespace

double group_cost(const Group& g, const CostMatrixZ& z, CostType type) {
  return matrix_cost(g.cost_submatrix(z), type);
}

namespace {

// Working state for the greedy clustering passes. Customer lists are kept
// sorted so candidate enumeration is deterministic.
class ClusterEngine {
 public:
  ClusterEngine(const ClusterSpec& spec, const CostMatrixZ& z, CostType type)
      : spec_(spec), z_(z), type_(type) {
    const int m = static_cast<int>(spec.group_depots.size());
    customers_.resize(m);
    demand_.assign(m, 0.0);
    cost_.assign(m, 0.0);
    for (std::size_t k = 0; k < spec.customers.size(); ++k)
      demand_of_[spec.customers[k]] = spec.demands[k];
    for (int j = 0; j < m; ++j) cost_[j] = eval(j, customers_[j]);
  }

  int group_count() const { return static_cast<int>(customers_.size()); }

  double total_cost() const { return std::accumulate(cost_.begin(), cost_.end(), 0.0); }

  void initial_insertion() {
    std::vector<NodeId> order = spec_.customers;
    std::sort(order.begin(), order.end());
    const int m = group_count();
    for (NodeId c : order) {
      std::vector<std::pair<double, int>> ranked;
      ranked.reserve(m);
      for (int j = 0; j < m; ++j) ranked.emplace_back(eval_with(j, c), j);
      std::sort(ranked.begin(), ranked.end());
      bool placed = false;
      for (const auto& [cost_jc, j] : ranked) {
        if (fits(j, c)) {
          insert(j, c, cost_jc);
          placed = true;
          break;
        }
      }
      if (!placed)
        throw InfeasibleClustering("Can't find feasible solution. add more vehicles.");
    }
  }

  // Repeats relocation, 1-1 swap and 2-1 swap sweeps until an entire outer
  // iteration improves the total by less than the threshold.
  void improve() {
    double total = total_cost();
    for (int iter = 0; iter < kMaxOuterIters; ++iter) {
      const double prev = total;
      relocation_sweep();
      swap11_sweep();
      swap21_sweep();
      total = total_cost();
      if (!(total < prev - kImproveEps)) break;
    }
  }

  std::vector<Group> groups() const {
    std::vector<Group> out;
    for (int j = 0; j < group_count(); ++j) {
      Group g;
      g.depot = spec_.group_depots[j];
      g.customers = customers_[j];
      out.push_back(std::move(g));
    }
    return out;
  }

 private:
  double eval(int j, const std::vector<NodeId>& members) const {
    Group g;
    g.depot = spec_.group_depots[j];
    g.customers = members;
    return group_cost(g, z_, type_);
  }

  double eval_with(int j, NodeId extra) const {
    std::vector<NodeId> members = customers_[j];
    members.insert(std::lower_bound(members.begin(), members.end(), extra), extra);
    return eval(j, members);
  }

  bool fits(int j, NodeId c) const {
    return demand_[j] + demand_of_.at(c) <= spec_.capacity + 1e-9 &&
           static_cast<int>(customers_[j].size()) + 1 <= spec_.n_max;
  }

  void insert(int j, NodeId c, double new_cost) {
    auto& v = customers_[j];
    v.insert(std::lower_bound(v.begin(), v.end(), c), c);
    demand_[j] += demand_of_.at(c);
    cost_[j] = new_cost;
    group_of_[c] = j;
  }

  void erase(int j, NodeId c, double new_cost) {
    auto& v = customers_[j];
    v.erase(std::find(v.begin(), v.end(), c));
    demand_[j] -= demand_of_.at(c);
    cost_[j] = new_cost;
    group_of_.erase(c);
  }

  void relocation_sweep() {
    std::vector<NodeId> order = spec_.customers;
    std::sort(order.begin(), order.end());
    for (NodeId c : order) {
      const int g0 = group_of_.at(c);
      std::vector<NodeId> without = customers_[g0];
      without.erase(std::find(without.begin(), without.end(), c));
      const double cost_without = eval(g0, without);
      erase(g0, c, cost_without);

      int best_j = -1;
      double best_cost_jc = 0.0, best_delta = std::numeric_limits<double>::infinity();
      for (int j = 0; j < group_count(); ++j) {
        if (!fits(j, c)) continue;
        const double cost_jc = eval_with(j, c);
        const double delta = cost_jc - cost_[j];
        if (delta < best_delta) {  // ties keep the lower group index
          best_delta = delta;
          best_j = j;
          best_cost_jc = cost_jc;
        }
      }
      // The home group always fits, so best_j is defined.
      insert(best_j, c, best_cost_jc);
    }
  }

  void swap11_sweep() {
    const int m = group_count();
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const std::vector<NodeId> snap_i = customers_[i];
        const std::vector<NodeId> snap_j = customers_[j];
        for (NodeId a : snap_i) {
          if (!group_of_.count(a) || group_of_.at(a) != i) continue;
          for (NodeId b : snap_j) {
            if (!group_of_.count(b) || group_of_.at(b) != j) continue;
            try_swap11(i, j, a, b);
          }
        }
      }
    }
  }

  void try_swap11(int i, int j, NodeId a, NodeId b) {
    const double qa = demand_of_.at(a), qb = demand_of_.at(b);
    if (demand_[i] - qa + qb > spec_.capacity + 1e-9) return;
    if (demand_[j] - qb + qa > spec_.capacity + 1e-9) return;
    std::vector<NodeId> gi = customers_[i];
    gi.erase(std::find(gi.begin(), gi.end(), a));
    gi.insert(std::lower_bound(gi.begin(), gi.end(), b), b);
    std::vector<NodeId> gj = customers_[j];
    gj.erase(std::find(gj.begin(), gj.end(), b));
    gj.insert(std::lower_bound(gj.begin(), gj.end(), a), a);
    const double ci = eval(i, gi), cj = eval(j, gj);
    if (ci + cj < cost_[i] + cost_[j] - kImproveEps) {
      customers_[i] = std::move(gi);
      customers_[j] = std::move(gj);
      demand_[i] += qb - qa;
      demand_[j] += qa - qb;
      cost_[i] = ci;
      cost_[j] = cj;
      group_of_[a] = j;
      group_of_[b] = i;
    }
  }

  void swap21_sweep() {
    const int m = group_count();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        const std::vector<NodeId> snap_i = customers_[i];
        const std::vector<NodeId> snap_j = customers_[j];
        for (std::size_t p = 0; p < snap_i.size(); ++p) {
          for (std::size_t q = p + 1; q < snap_i.size(); ++q) {
            const NodeId a1 = snap_i[p], a2 = snap_i[q];
            if (!group_of_.count(a1) || group_of_.at(a1) != i) continue;
            if (!group_of_.count(a2) || group_of_.at(a2) != i) continue;
            for (NodeId b : snap_j) {
              if (!group_of_.count(b) || group_of_.at(b) != j) continue;
              try_swap21(i, j, a1, a2, b);
            }
          }
        }
      }
    }
  }

  void try_swap21(int i, int j, NodeId a1, NodeId a2, NodeId b) {
    const double qa = demand_of_.at(a1) + demand_of_.at(a2);
    const double qb = demand_of_.at(b);
    if (demand_[i] - qa + qb > spec_.capacity + 1e-9) return;
    if (demand_[j] - qb + qa > spec_.capacity + 1e-9) return;
    if (static_cast<int>(customers_[j].size()) + 1 > spec_.n_max) return;
    std::vector<NodeId> gi = customers_[i];
    gi.erase(std::find(gi.begin(), gi.end(), a1));
    gi.erase(std::find(gi.begin(), gi.end(), a2));
    gi.insert(std::lower_bound(gi.begin(), gi.end(), b), b);
    std::vector<NodeId> gj = customers_[j];
    gj.erase(std::find(gj.begin(), gj.end(), b));
    gj.insert(std::lower_bound(gj.begin(), gj.end(), a1), a1);
    gj.insert(std::lower_bound(gj.begin(), gj.end(), a2), a2);
    const double ci = eval(i, gi), cj = eval(j, gj);
    if (ci + cj < cost_[i] + cost_[j] - kImproveEps) {
      customers_[i] = std::move(gi);
      customers_[j] = std::move(gj);
      demand_[i] += qb - qa;
      demand_[j] += qa - qb;
      cost_[i] = ci;
      cost_[j] = cj;
      group_of_[a1] = j;
      group_of_[a2] = j;
      group_of_[b] = i;
    }
  }

  ClusterSpec spec_;
  const CostMatrixZ& z_;
  CostType type_;
  std::vector<std::vector<NodeId>> customers_;
  std::vector<double> demand_;
  std::vector<double> cost_;
  std::map<NodeId, double> demand_of_;
  std::map<NodeId, int> group_of_;
};

}  // namespace

std::vector<Group> cluster_nodes(const ClusterSpec& spec, const CostMatrixZ& z, CostType type) {
  if (spec.group_depots.empty()) throw ValidationError("clustering needs at least one group");
  if (spec.customers.size() != spec.demands.size())
    throw ValidationError("customers/demands size mismatch");
  ClusterEngine engine(spec, z, type);
  engine.initial_insertion();
  engine.improve();
  return engine.groups();
}

Clustering cluster(const Instance& inst, const CostMatrixZ& z, CostType type) {
  ClusterSpec spec;
  for (NodeId d : inst.depot_ids())
    for (int k = 0; k < inst.nodes[d].vehicles_at; ++k) spec.group_depots.push_back(d);
  spec.customers = inst.customer_ids();
  for (NodeId c : spec.customers) spec.demands.push_back(inst.nodes[c].demand);
  spec.capacity = inst.vehicle.capacity;
  spec.n_max = inst.vehicle.n_max;
  if (inst.total_demand() > spec.capacity * spec.group_depots.size() + 1e-9)
    throw InfeasibleClustering("Can't find feasible solution. add more vehicles.");

  Clustering clu;
  clu.cost_type = type;
  clu.groups = cluster_nodes(spec, z, type);
  clu.total_cost = 0.0;
  for (const auto& g : clu.groups) clu.total_cost += group_cost(g, z, type);
  return clu;
}

Clustering attach_stations(Clustering clu, const Instance& inst, const CostMatrixZ& z) {
  const auto phys = inst.physical_station_ids();
  if (phys.empty()) return clu;

  // Physical stations wanted per group: nearest station per member node.
  std::vector<std::vector<NodeId>> wanted(clu.groups.size());
  for (std::size_t g = 0; g < clu.groups.size(); ++g) {
    std::vector<NodeId> want;
    for (NodeId node : clu.groups[g].member_nodes()) {
      NodeId best = phys.front();
      double best_cost = z.z(node, phys.front());
      for (NodeId s : phys) {
        const double c = z.z(node, s);
        if (c < best_cost) {
          best_cost = c;
          best = s;
        }
      }
      if (std::find(want.begin(), want.end(), best) == want.end()) want.push_back(best);
    }
    std::sort(want.begin(), want.end());
    wanted[g] = std::move(want);
  }

  // Deal each physical station's virtual copies to the groups that want it,
  // cyclically in group order; a lone group takes all copies.
  for (NodeId s : phys) {
    std::vector<std::size_t> takers;
    for (std::size_t g = 0; g < clu.groups.size(); ++g)
      if (std::binary_search(wanted[g].begin(), wanted[g].end(), s)) takers.push_back(g);
    if (takers.empty()) continue;
    const auto copies = inst.copies_of_station(s);
    for (std::size_t k = 0; k < copies.size(); ++k)
      clu.groups[takers[k % takers.size()]].stations.push_back(copies[k]);
  }
  for (auto& g : clu.groups) std::sort(g.stations.begin(), g.stations.end());
  return clu;
}

std::string save_clustering(const Clustering& clu) {
  std::ostringstream out;
  out << "recvrp-clustering 1\n";
  out << "cost_type " << cost_type_name(clu.cost_type) << "\n";
  out << "total_cost " << format_double(clu.total_cost) << "\n";
  out << "groups " << clu.groups.size() << "\n";
  for (std::size_t g = 0; g < clu.groups.size(); ++g) {
    out << "group " << g << " depot " << clu.groups[g].depot << " customers";
    for (NodeId c : clu.groups[g].customers) out << ' ' << c;
    out << " stations";
    for (NodeId s : clu.groups[g].stations) out << ' ' << s;
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

}  // namespace recvrp
