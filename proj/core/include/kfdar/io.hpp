#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfdar/instance.hpp"

namespace kfdar {

// In-memory form of the instance file:
//   { "n": int, "points": [[x,y],...] OR "dist": [[...]], "root": int,
//     "capacity": int, "k": int?, "demands": [{"s":int,"t":int,"w":int},...],
//     "costs": { "edges": [[u,v],...], "table": [[c(0),...,c(m)],...] }? }
struct InstanceFile {
  Metric metric;
  std::optional<std::vector<Point>> points;
  Vertex root = 0;
  std::int64_t capacity = 1;
  std::optional<int> k;
  std::vector<Demand> demands;
  std::optional<CostTable> costs;

  DialARideInstance dial_a_ride() const;
  // Uses `k` from the file; throws InvalidInstance when it is absent.
  KForestInstance kforest() const;

  static InstanceFile from(const DialARideInstance& instance);
  static InstanceFile from(const KForestInstance& instance);
};

// All parse failures raise InvalidInstance with a readable message.
InstanceFile instance_from_json(const nlohmann::json& j);
nlohmann::ordered_json instance_to_json(const InstanceFile& file);

Tour tour_from_json(const nlohmann::json& j);
nlohmann::ordered_json tour_to_json(const Tour& tour);

InstanceFile load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const InstanceFile& file);
Tour load_tour(const std::filesystem::path& path);
void save_tour(const std::filesystem::path& path, const Tour& tour);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace kfdar
