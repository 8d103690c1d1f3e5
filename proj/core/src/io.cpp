#include "kfdar/io.hpp"

#include <fstream>
#include <sstream>

#include "kfdar/errors.hpp"

namespace kfdar {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInstance(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace

DialARideInstance InstanceFile::dial_a_ride() const {
  DialARideInstance inst;
  inst.metric = metric;
  inst.root = root;
  inst.demands = demands;
  inst.capacity = capacity;
  inst.points = points;
  inst.validate();
  return inst;
}

KForestInstance InstanceFile::kforest() const {
  if (!k) throw InvalidInstance("instance file has no \"k\" field");
  KForestInstance inst;
  inst.metric = metric;
  inst.demands = demands;
  for (auto& d : inst.demands) d.w = 1;
  inst.k = *k;
  inst.validate();
  return inst;
}

InstanceFile InstanceFile::from(const DialARideInstance& instance) {
  InstanceFile f;
  f.metric = instance.metric;
  f.points = instance.points;
  f.root = instance.root;
  f.capacity = instance.capacity;
  f.demands = instance.demands;
  return f;
}

InstanceFile InstanceFile::from(const KForestInstance& instance) {
  InstanceFile f;
  f.metric = instance.metric;
  f.demands = instance.demands;
  f.k = instance.k;
  f.capacity = std::max<std::int64_t>(1, static_cast<std::int64_t>(instance.demands.size()));
  return f;
}

InstanceFile instance_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInstance("instance file must be a JSON object");
  InstanceFile f;
  const auto n = get_field<std::int64_t>(j, "n");
  if (n < 1) throw InvalidInstance("\"n\" must be positive");

  if (j.contains("dist")) {
    const auto rows = get_field<std::vector<std::vector<double>>>(j, "dist");
    if (static_cast<std::int64_t>(rows.size()) != n) {
      throw InvalidInstance("\"dist\" must have n rows");
    }
    f.metric = Metric::from_matrix(rows);
  }
  if (j.contains("points")) {
    const auto raw = get_field<std::vector<std::vector<double>>>(j, "points");
    if (static_cast<std::int64_t>(raw.size()) != n) {
      throw InvalidInstance("\"points\" must have n entries");
    }
    std::vector<Point> points;
    for (const auto& p : raw) {
      if (p.size() != 2) throw InvalidInstance("each point must be [x, y]");
      points.push_back({p[0], p[1]});
    }
    if (!j.contains("dist")) f.metric = metric_from_points(points);
    f.points = std::move(points);
  }
  if (!j.contains("dist") && !j.contains("points")) {
    throw InvalidInstance("instance needs either \"points\" or \"dist\"");
  }

  f.root = j.contains("root") ? get_field<Vertex>(j, "root") : 0;
  f.capacity = j.contains("capacity") ? get_field<std::int64_t>(j, "capacity") : 1;
  if (j.contains("k")) f.k = get_field<int>(j, "k");

  const auto& demands = j.contains("demands") ? j.at("demands") : json::array();
  if (!demands.is_array()) throw InvalidInstance("\"demands\" must be an array");
  for (const auto& d : demands) {
    Demand dem;
    dem.s = get_field<Vertex>(d, "s");
    dem.t = get_field<Vertex>(d, "t");
    dem.w = d.contains("w") ? get_field<std::int64_t>(d, "w") : 1;
    f.demands.push_back(dem);
  }

  if (j.contains("costs")) {
    const auto& c = j.at("costs");
    CostTable table;
    for (const auto& e : get_field<std::vector<std::vector<Vertex>>>(c, "edges")) {
      if (e.size() != 2) throw InvalidInstance("each cost edge must be [u, v]");
      table.edges.emplace_back(e[0], e[1]);
    }
    table.table = get_field<std::vector<std::vector<double>>>(c, "table");
    if (table.table.size() != table.edges.size()) {
      throw InvalidInstance("\"costs.table\" needs one row per edge");
    }
    f.costs = std::move(table);
  }

  if (!f.metric.valid_vertex(f.root)) throw InvalidInstance("root out of range");
  for (const auto& d : f.demands) {
    if (!f.metric.valid_vertex(d.s) || !f.metric.valid_vertex(d.t)) {
      throw InvalidInstance("demand endpoint out of range");
    }
    if (d.w < 1) throw InvalidInstance("demand weight must be at least 1");
  }
  return f;
}

ordered_json instance_to_json(const InstanceFile& f) {
  ordered_json j;
  const auto n = f.metric.size();
  j["n"] = n;
  if (f.points) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : *f.points) pts.push_back({p.x, p.y});
    j["points"] = std::move(pts);
  } else {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = f.metric.row(static_cast<Vertex>(i));
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["dist"] = std::move(rows);
  }
  j["root"] = f.root;
  j["capacity"] = f.capacity;
  if (f.k) j["k"] = *f.k;
  ordered_json demands = ordered_json::array();
  for (const auto& d : f.demands) {
    ordered_json dj;
    dj["s"] = d.s;
    dj["t"] = d.t;
    dj["w"] = d.w;
    demands.push_back(std::move(dj));
  }
  j["demands"] = std::move(demands);
  if (f.costs) {
    ordered_json edges = ordered_json::array();
    for (const auto& [u, v] : f.costs->edges) edges.push_back({u, v});
    j["costs"]["edges"] = std::move(edges);
    j["costs"]["table"] = f.costs->table;
  }
  return j;
}

Tour tour_from_json(const json& j) {
  if (!j.is_object() || !j.contains("stops") || !j.at("stops").is_array()) {
    throw InvalidInstance("tour file must be an object with a \"stops\" array");
  }
  Tour tour;
  for (const auto& s : j.at("stops")) {
    Stop stop;
    stop.v = get_field<Vertex>(s, "v");
    if (s.contains("pick")) stop.pick = get_field<std::vector<DemandId>>(s, "pick");
    if (s.contains("drop")) stop.drop = get_field<std::vector<DemandId>>(s, "drop");
    tour.stops.push_back(std::move(stop));
  }
  return tour;
}

ordered_json tour_to_json(const Tour& tour) {
  ordered_json stops = ordered_json::array();
  for (const auto& s : tour.stops) {
    ordered_json sj;
    sj["v"] = s.v;
    sj["pick"] = s.pick;
    sj["drop"] = s.drop;
    stops.push_back(std::move(sj));
  }
  ordered_json j;
  j["stops"] = std::move(stops);
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInstance(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

InstanceFile load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

void save_instance(const std::filesystem::path& path, const InstanceFile& file) {
  write_json_file(path, instance_to_json(file));
}

Tour load_tour(const std::filesystem::path& path) { return tour_from_json(read_json_file(path)); }

void save_tour(const std::filesystem::path& path, const Tour& tour) {
  write_json_file(path, tour_to_json(tour));
}

}  // namespace kfdar
