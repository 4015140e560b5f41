#include "recvrp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <sstream>

namespace recvrp {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("bad number '" + token + "'");
  }
  return v;
}

namespace detail {

// mt19937_64 output is specified by the standard; mapping to doubles is done
// here rather than with std::uniform_real_distribution so that generated
// instances are identical across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n) by scaling; n stays tiny here so the bias of the
// scaled draw is far below anything observable.
int uniform_int(std::mt19937_64& rng, int n) {
  int v = static_cast<int>(uniform01(rng) * n);
  return std::min(v, n - 1);
}

void fill_sigmas(Instance& inst, RelSigma rel, std::mt19937_64& rng) {
  if (!(rel.lo >= 0.0 && rel.hi < 1.0 && rel.lo <= rel.hi)) {
    throw ValidationError("rel_sigma must lie within [0, 1)");
  }
  const NodeId np = inst.physical_count;
  const NodeId n = inst.size();
  Eigen::MatrixXd rt(np, np), re(np, np);
  rt.setZero();
  re.setZero();
  for (NodeId i = 0; i < np; ++i) {
    for (NodeId j = 0; j < np; ++j) {
      if (i == j) continue;
      rt(i, j) = uniform(rng, rel.lo, rel.hi);
      re(i, j) = uniform(rng, rel.lo, rel.hi);
    }
  }
  inst.edges.t_sigma.resize(n, n);
  inst.edges.e_sigma.resize(n, n);
  for (NodeId i = 0; i < n; ++i) {
    const NodeId pi = inst.physical_station_of(i);
    for (NodeId j = 0; j < n; ++j) {
      const NodeId pj = inst.physical_station_of(j);
      if (i == j || pi == pj) {
        inst.edges.t_sigma(i, j) = 0.0;
        inst.edges.e_sigma(i, j) = 0.0;
      } else {
        inst.edges.t_sigma(i, j) = rt(pi, pj) * inst.edges.t_mu(i, j);
        inst.edges.e_sigma(i, j) = re(pi, pj) * inst.edges.e_mu(i, j);
      }
    }
  }
}

}  // namespace detail

std::vector<NodeId> Instance::depot_ids() const {
  std::vector<NodeId> out;
  for (const auto& nd : nodes)
    if (nd.kind == NodeKind::Depot) out.push_back(nd.id);
  return out;
}

std::vector<NodeId> Instance::customer_ids() const {
  std::vector<NodeId> out;
  for (const auto& nd : nodes)
    if (nd.kind == NodeKind::Customer) out.push_back(nd.id);
  return out;
}

std::vector<NodeId> Instance::station_ids() const {
  std::vector<NodeId> out;
  for (const auto& nd : nodes)
    if (nd.kind == NodeKind::Station) out.push_back(nd.id);
  return out;
}

std::vector<NodeId> Instance::physical_station_ids() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < physical_count; ++i)
    if (nodes[i].kind == NodeKind::Station) out.push_back(i);
  return out;
}

NodeId Instance::physical_station_of(NodeId id) const {
  if (id < physical_count) return id;
  const auto phys = physical_station_ids();
  const int per_station = station_copies - 1;
  const NodeId ordinal = (id - physical_count) / per_station;
  return phys[ordinal];
}

std::vector<NodeId> Instance::copies_of_station(NodeId physical) const {
  std::vector<NodeId> out{physical};
  const auto phys = physical_station_ids();
  const int per_station = station_copies - 1;
  for (std::size_t k = 0; k < phys.size(); ++k) {
    if (phys[k] == physical) {
      for (int c = 0; c < per_station; ++c)
        out.push_back(physical_count + static_cast<NodeId>(k) * per_station + c);
      break;
    }
  }
  return out;
}

int Instance::total_vehicles() const {
  int m = 0;
  for (const auto& nd : nodes) m += nd.vehicles_at;
  return m;
}

double Instance::total_demand() const {
  double q = 0.0;
  for (const auto& nd : nodes) q += nd.demand;
  return q;
}

bool Instance::is_load_feasible() const {
  return total_demand() <= total_vehicles() * vehicle.capacity + 1e-9;
}

void Instance::validate() const {
  const NodeId n = size();
  if (n == 0) throw ValidationError("instance has no nodes");
  int depots = 0, customers = 0;
  for (NodeId i = 0; i < n; ++i) {
    const Node& nd = nodes[i];
    if (nd.id != i) throw ValidationError("node ids must be contiguous from 0");
    if (nd.kind == NodeKind::Depot) ++depots;
    if (nd.kind == NodeKind::Customer) ++customers;
    if (nd.demand < 0) throw ValidationError("negative demand");
    if (nd.demand > 0 && nd.kind != NodeKind::Customer)
      throw ValidationError("demand on a non-customer node");
    if (nd.vehicles_at > 0 && nd.kind != NodeKind::Depot)
      throw ValidationError("vehicles on a non-depot node");
    if (nd.kind == NodeKind::Customer && nd.demand > vehicle.capacity)
      throw ValidationError("customer demand exceeds vehicle capacity");
  }
  if (depots == 0) throw ValidationError("instance needs at least one depot");
  if (customers == 0) throw ValidationError("instance needs at least one customer");
  if (total_vehicles() < 1) throw ValidationError("instance needs at least one vehicle");
  if (station_copies < 1) throw ValidationError("station_copies must be >= 1");
  const auto check_matrix = [&](const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != n || m.cols() != n)
      throw ValidationError(std::string(what) + " has wrong dimensions");
    for (NodeId i = 0; i < n; ++i) {
      if (m(i, i) != 0.0) throw ValidationError(std::string(what) + " has nonzero diagonal");
      for (NodeId j = 0; j < n; ++j)
        if (m(i, j) < 0.0) throw ValidationError(std::string(what) + " has negative entries");
    }
  };
  check_matrix(edges.t_mu, "t_mu");
  check_matrix(edges.t_sigma, "t_sigma");
  check_matrix(edges.e_mu, "e_mu");
  check_matrix(edges.e_sigma, "e_sigma");
  if (!(vehicle.capacity > 0)) throw ValidationError("capacity must be positive");
  if (!(vehicle.charge_rate > 0)) throw ValidationError("charge rate must be positive");
  if (!(vehicle.soc_min < vehicle.soc_start && vehicle.soc_start <= vehicle.soc_max))
    throw ValidationError("need soc_min < soc_start <= soc_max");
  if (vehicle.n_max < 1) throw ValidationError("n_max must be >= 1");
  if (!(robustness.p_e > 0.5 && robustness.p_e < 1.0))
    throw ValidationError("p_e must lie in (0.5, 1)");
  if (!(robustness.p_t >= 0.5 && robustness.p_t < 1.0))
    throw ValidationError("p_t must lie in [0.5, 1)");
}

namespace {

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Appends (station_copies - 1) copies per physical station, grouped per
// station in ascending id order. Positions and demands mirror the original.
void materialize_copies(Instance& inst) {
  inst.physical_count = inst.size();
  if (inst.station_copies <= 1) return;
  const auto phys = inst.physical_station_ids();
  for (NodeId s : phys) {
    for (int c = 1; c < inst.station_copies; ++c) {
      Node copy = inst.nodes[s];
      copy.id = inst.size();
      inst.nodes.push_back(copy);
    }
  }
}

// Builds all four matrices from coordinates: times are Euclidean distances,
// energies are energy_per_dist times distance, sigmas zero.
void build_euclidean_edges(Instance& inst, double energy_per_dist) {
  const NodeId n = inst.size();
  inst.edges.t_mu.setZero(n, n);
  inst.edges.e_mu.setZero(n, n);
  inst.edges.t_sigma.setZero(n, n);
  inst.edges.e_sigma.setZero(n, n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = dist(*inst.nodes[i].position, *inst.nodes[j].position);
      inst.edges.t_mu(i, j) = d;
      inst.edges.e_mu(i, j) = energy_per_dist * d;
    }
  }
}

}  // namespace

Instance parse_benchmark(const std::string& text, int station_copies) {
  std::istringstream in(text);
  return parse_benchmark(in, station_copies);
}

Instance parse_benchmark(std::istream& in, int station_copies) {
  std::map<std::string, std::string> header;
  std::vector<std::string> lines;
  {
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  auto split_ws = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  };

  std::size_t pos = 0;
  auto is_section = [](const std::string& s) {
    return s.find("_SECTION") != std::string::npos;
  };
  for (; pos < lines.size(); ++pos) {
    std::string line = lines[pos];
    if (line.empty()) continue;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (is_section(toks[0]) || toks[0] == "EOF") break;
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError("expected KEY: value in header", static_cast<int>(pos) + 1);
    }
    std::string key = line.substr(0, colon);
    std::string val = line.substr(colon + 1);
    auto trim = [](std::string s) {
      const char* ws = " \t\r";
      s.erase(0, s.find_first_not_of(ws));
      auto last = s.find_last_not_of(ws);
      s.erase(last == std::string::npos ? 0 : last + 1);
      return s;
    };
    key = trim(key);
    std::transform(key.begin(), key.end(), key.begin(), ::toupper);
    if (key == "COMMENT") continue;
    header[key] = trim(val);
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end())
      throw ParseError("missing mandatory header key " + key, static_cast<int>(pos) + 1);
    return it->second;
  };

  const int dimension = static_cast<int>(parse_double(require("DIMENSION")));
  const int n_stations = static_cast<int>(parse_double(require("STATIONS")));
  const double capacity = parse_double(require("CAPACITY"));
  const double energy_capacity = parse_double(require("ENERGY_CAPACITY"));
  const double energy_consumption = parse_double(require("ENERGY_CONSUMPTION"));
  const int vehicles = static_cast<int>(parse_double(require("VEHICLES")));

  Instance inst;
  if (auto it = header.find("NAME"); it != header.end()) {
    inst.name = it->second;
    if (inst.name.size() > 5 && inst.name.substr(inst.name.size() - 5) == ".evrp")
      inst.name.resize(inst.name.size() - 5);
  }
  if (auto it = header.find("OPTIMAL_VALUE"); it != header.end())
    inst.reference_cost = parse_double(it->second);

  const int n_total = dimension + n_stations;
  inst.nodes.resize(n_total);
  std::vector<bool> has_coord(n_total, false);

  auto read_index = [&](const std::string& tok, int line_no) {
    int id = static_cast<int>(parse_double(tok));
    if (id < 1 || id > n_total) throw ParseError("node index out of range", line_no);
    return id - 1;
  };

  bool saw_coords = false, saw_demand = false, saw_station_ids = false, saw_depot = false;
  std::vector<int> depot_ids_file;
  std::vector<bool> is_station_file(n_total, false);

  while (pos < lines.size()) {
    auto toks = split_ws(lines[pos]);
    if (toks.empty()) {
      ++pos;
      continue;
    }
    const std::string section = toks[0];
    ++pos;
    if (section == "EOF") break;
    if (section == "NODE_COORD_SECTION") {
      saw_coords = true;
      for (int k = 0; k < n_total; ++k, ++pos) {
        if (pos >= lines.size()) throw ParseError("truncated NODE_COORD_SECTION");
        auto t = split_ws(lines[pos]);
        if (t.size() != 3)
          throw ParseError("expected 'id x y'", static_cast<int>(pos) + 1);
        int id = read_index(t[0], static_cast<int>(pos) + 1);
        inst.nodes[id].position = Vec2{parse_double(t[1]), parse_double(t[2])};
        has_coord[id] = true;
      }
    } else if (section == "DEMAND_SECTION") {
      saw_demand = true;
      for (int k = 0; k < dimension; ++k, ++pos) {
        if (pos >= lines.size()) throw ParseError("truncated DEMAND_SECTION");
        auto t = split_ws(lines[pos]);
        if (t.size() != 2)
          throw ParseError("expected 'id demand'", static_cast<int>(pos) + 1);
        int id = read_index(t[0], static_cast<int>(pos) + 1);
        inst.nodes[id].demand = parse_double(t[1]);
      }
    } else if (section == "STATIONS_COORD_SECTION") {
      saw_station_ids = true;
      for (int k = 0; k < n_stations; ++k, ++pos) {
        if (pos >= lines.size()) throw ParseError("truncated STATIONS_COORD_SECTION");
        auto t = split_ws(lines[pos]);
        if (t.empty()) throw ParseError("expected station id", static_cast<int>(pos) + 1);
        int id = read_index(t[0], static_cast<int>(pos) + 1);
        is_station_file[id] = true;
      }
    } else if (section == "DEPOT_SECTION") {
      saw_depot = true;
      while (pos < lines.size()) {
        auto t = split_ws(lines[pos]);
        ++pos;
        if (t.empty()) continue;
        if (t[0] == "-1") break;
        depot_ids_file.push_back(read_index(t[0], static_cast<int>(pos)));
      }
    } else {
      throw ParseError("unknown section " + section, static_cast<int>(pos));
    }
  }
  if (!saw_coords) throw ParseError("missing NODE_COORD_SECTION");
  if (!saw_demand) throw ParseError("missing DEMAND_SECTION");
  if (n_stations > 0 && !saw_station_ids) throw ParseError("missing STATIONS_COORD_SECTION");
  if (!saw_depot || depot_ids_file.empty()) throw ParseError("missing DEPOT_SECTION");
  for (int i = 0; i < n_total; ++i)
    if (!has_coord[i]) throw ParseError("node " + std::to_string(i + 1) + " has no coordinates");

  for (int i = 0; i < n_total; ++i) {
    Node& nd = inst.nodes[i];
    nd.id = i;
    nd.kind = is_station_file[i] ? NodeKind::Station : NodeKind::Customer;
  }
  for (int d : depot_ids_file) {
    if (is_station_file[d]) throw ParseError("depot listed as charging station");
    inst.nodes[d].kind = NodeKind::Depot;
    inst.nodes[d].demand = 0.0;
  }
  inst.nodes[depot_ids_file.front()].vehicles_at = vehicles;

  int n_customers = 0;
  for (const auto& nd : inst.nodes)
    if (nd.kind == NodeKind::Customer) {
      ++n_customers;
      if (nd.demand > capacity) throw ValidationError("customer demand exceeds CAPACITY");
    }

  inst.vehicle.capacity = capacity;
  inst.vehicle.soc_max = energy_capacity;
  inst.vehicle.soc_start = energy_capacity;
  inst.vehicle.soc_min = 0.0;
  inst.vehicle.n_max = std::max(1, n_customers);
  inst.vehicle.charge_rate = 1e9;  // the format carries no charging rate
  inst.station_copies = std::max(1, station_copies);

  materialize_copies(inst);
  build_euclidean_edges(inst, energy_consumption);
  inst.validate();
  return inst;
}

Instance make_stochastic(const Instance& inst, RelSigma rel, std::uint64_t seed) {
  Instance out = inst;
  std::mt19937_64 rng(seed);
  detail::fill_sigmas(out, rel, rng);
  return out;
}

Instance generate_random(int n_nodes, const std::vector<int>& depot_vehicle_layout,
                         std::uint64_t seed, int station_copies) {
  const int n_depots = static_cast<int>(depot_vehicle_layout.size());
  if (n_depots < 1) throw ValidationError("need at least one depot");
  if (n_nodes < n_depots + 1) throw ValidationError("need n_nodes >= depots + 1");
  int total_vehicles = 0;
  for (int m : depot_vehicle_layout) {
    if (m < 0) throw ValidationError("negative vehicle count");
    total_vehicles += m;
  }
  if (total_vehicles < 1) throw ValidationError("layout has zero vehicles");

  const int n_stations = std::max(1, static_cast<int>(std::ceil(0.10 * n_nodes)));
  const int n_customers = n_nodes - n_depots - n_stations;
  if (n_customers < 1) throw ValidationError("layout leaves no room for customers");

  std::mt19937_64 rng(seed);
  Instance inst;
  inst.nodes.resize(n_nodes);
  // Draw order: positions, station subset, demands, then edge sigmas.
  for (int i = 0; i < n_nodes; ++i) {
    double x = detail::uniform(rng, 0.0, 100.0);
    double y = detail::uniform(rng, 0.0, 100.0);
    inst.nodes[i].id = i;
    inst.nodes[i].position = Vec2{x, y};
  }
  for (int d = 0; d < n_depots; ++d) {
    inst.nodes[d].kind = NodeKind::Depot;
    inst.nodes[d].vehicles_at = depot_vehicle_layout[d];
  }
  std::vector<int> pool;
  for (int i = n_depots; i < n_nodes; ++i) pool.push_back(i);
  for (int k = 0; k < n_stations; ++k) {
    int pick = detail::uniform_int(rng, static_cast<int>(pool.size()));
    inst.nodes[pool[pick]].kind = NodeKind::Station;
    pool.erase(pool.begin() + pick);
  }
  for (int i : pool) inst.nodes[i].kind = NodeKind::Customer;
  for (int i = n_depots; i < n_nodes; ++i) {
    if (inst.nodes[i].kind == NodeKind::Customer)
      inst.nodes[i].demand = detail::uniform(rng, 5.0, 20.0);
  }

  inst.vehicle.capacity = 100.0;
  inst.vehicle.soc_max = 100.0;
  inst.vehicle.soc_start = 100.0;
  inst.vehicle.soc_min = 0.0;
  inst.vehicle.charge_rate = 3.0;
  inst.vehicle.n_max = std::max(1, n_customers);
  inst.station_copies = std::max(1, station_copies);

  std::string kpart;
  for (int m : depot_vehicle_layout) kpart += std::to_string(m);
  inst.name = "SR-n" + std::to_string(n_nodes) + "-k" + kpart;

  materialize_copies(inst);
  build_euclidean_edges(inst, 1.85);
  detail::fill_sigmas(inst, RelSigma::range(0.05, 0.30), rng);
  inst.validate();
  return inst;
}

namespace {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Depot: return "depot";
    case NodeKind::Customer: return "customer";
    case NodeKind::Station: return "station";
  }
  return "?";
}

NodeKind kind_from(const std::string& s, int line) {
  if (s == "depot") return NodeKind::Depot;
  if (s == "customer") return NodeKind::Customer;
  if (s == "station") return NodeKind::Station;
  throw ParseError("unknown node kind '" + s + "'", line);
}

void write_matrix(std::ostringstream& out, const char* label, const Eigen::MatrixXd& m) {
  out << "matrix " << label << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

}  // namespace

std::string save_instance(const Instance& inst) {
  std::ostringstream out;
  out << "recvrp-instance 1\n";
  out << "name " << inst.name << "\n";
  out << "station_copies " << inst.station_copies << "\n";
  out << "physical_count " << inst.physical_count << "\n";
  if (inst.reference_cost)
    out << "reference " << format_double(*inst.reference_cost) << "\n";
  const auto& v = inst.vehicle;
  out << "vehicle " << format_double(v.capacity) << ' ' << format_double(v.soc_max) << ' '
      << format_double(v.soc_min) << ' ' << format_double(v.soc_start) << ' ' << v.n_max
      << ' ' << format_double(v.charge_rate) << "\n";
  out << "robustness " << format_double(inst.robustness.p_e) << ' '
      << format_double(inst.robustness.p_t) << "\n";
  out << "nodes " << inst.size() << "\n";
  for (const auto& nd : inst.nodes) {
    out << "node " << nd.id << ' ' << kind_name(nd.kind) << ' ';
    if (nd.position)
      out << format_double(nd.position->x) << ' ' << format_double(nd.position->y);
    else
      out << "- -";
    out << ' ' << format_double(nd.demand) << ' ' << nd.vehicles_at << "\n";
  }
  write_matrix(out, "t_mu", inst.edges.t_mu);
  write_matrix(out, "t_sigma", inst.edges.t_sigma);
  write_matrix(out, "e_mu", inst.edges.e_mu);
  write_matrix(out, "e_sigma", inst.edges.e_sigma);
  out << "end\n";
  return out.str();
}

Instance load_instance(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError("unexpected end of document", line_no);
    ++line_no;
    return line;
  };

  next_line();
  {
    std::istringstream ss(line);
    std::string tag;
    int version = 0;
    ss >> tag >> version;
    if (tag != "recvrp-instance") throw ParseError("not a recvrp instance document", 1);
    if (version != 1) throw ParseError("unsupported instance format version", 1);
  }

  Instance inst;
  int declared_nodes = -1;
  bool saw_end = false;
  int matrices_seen = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key.empty()) continue;
    if (key == "end") {
      saw_end = true;
      break;
    } else if (key == "name") {
      std::string rest;
      std::getline(ss, rest);
      if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
      inst.name = rest;
    } else if (key == "station_copies") {
      ss >> inst.station_copies;
    } else if (key == "physical_count") {
      ss >> inst.physical_count;
    } else if (key == "reference") {
      std::string tok;
      ss >> tok;
      inst.reference_cost = parse_double(tok);
    } else if (key == "vehicle") {
      std::string a, b, c, d, f;
      int nm;
      ss >> a >> b >> c >> d >> nm >> f;
      if (!ss) throw ParseError("bad vehicle line", line_no);
      inst.vehicle = {parse_double(a), parse_double(b), parse_double(c),
                      parse_double(d),  nm,              parse_double(f)};
    } else if (key == "robustness") {
      std::string pe, pt;
      ss >> pe >> pt;
      inst.robustness = {parse_double(pe), parse_double(pt)};
    } else if (key == "nodes") {
      ss >> declared_nodes;
      if (declared_nodes < 1) throw ParseError("bad node count", line_no);
    } else if (key == "node") {
      int id;
      std::string kind, xs, ys, ds;
      int veh;
      ss >> id >> kind >> xs >> ys >> ds >> veh;
      if (!ss) throw ParseError("bad node line", line_no);
      Node nd;
      nd.id = id;
      nd.kind = kind_from(kind, line_no);
      if (xs != "-") nd.position = Vec2{parse_double(xs), parse_double(ys)};
      nd.demand = parse_double(ds);
      nd.vehicles_at = veh;
      if (id != static_cast<int>(inst.nodes.size()))
        throw ParseError("node lines out of order", line_no);
      inst.nodes.push_back(nd);
    } else if (key == "matrix") {
      std::string label;
      ss >> label;
      if (declared_nodes < 0) throw ParseError("matrix before node count", line_no);
      Eigen::MatrixXd m(declared_nodes, declared_nodes);
      for (int i = 0; i < declared_nodes; ++i) {
        next_line();
        std::istringstream row(line);
        std::string tok;
        for (int j = 0; j < declared_nodes; ++j) {
          if (!(row >> tok)) throw ParseError("short matrix row", line_no);
          m(i, j) = parse_double(tok);
        }
        if (row >> tok) throw ParseError("long matrix row", line_no);
      }
      ++matrices_seen;
      if (label == "t_mu") inst.edges.t_mu = std::move(m);
      else if (label == "t_sigma") inst.edges.t_sigma = std::move(m);
      else if (label == "e_mu") inst.edges.e_mu = std::move(m);
      else if (label == "e_sigma") inst.edges.e_sigma = std::move(m);
      else throw ParseError("unknown matrix label " + label, line_no);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  if (!saw_end) throw ParseError("missing end marker", line_no);
  if (declared_nodes != static_cast<int>(inst.nodes.size()))
    throw ParseError("node count mismatch", line_no);
  if (matrices_seen != 4) throw ParseError("expected four matrix blocks", line_no);
  inst.validate();
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_instance(ss.str());
}

void save_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << save_instance(inst);
}

Instance load_any_instance_file(const std::string& path, int station_copies) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  if (text.rfind("recvrp-instance", 0) == 0) return load_instance(text);
  return parse_benchmark(text, station_copies);
}

}  // namespace recvrp
