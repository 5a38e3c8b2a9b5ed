// Copyright 2026 The fgpga Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgp/graph_model.hpp"

namespace fgp {

/// Malformed or unreadable instance file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

/// Instance document:
///   {"name": ...,
///    "application": {"demands": [...], "edges": [[i, j, w], ...]},
///    "machines": {"capacities": [...], "link_cost": [[...], ...]}}
inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json doc;
  doc["name"] = inst.name;
  auto& app = doc["application"];
  app["demands"] = std::vector<double>(inst.app.demands().begin(), inst.app.demands().end());
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : inst.app.edges()) edges.push_back({e.u, e.v, e.weight});
  app["edges"] = std::move(edges);
  auto& machines = doc["machines"];
  machines["capacities"] = std::vector<double>(inst.machines.capacities().begin(), inst.machines.capacities().end());
  machines["link_cost"] = inst.machines.link_matrix();
  return doc;
}

inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(1) + "\n"; }

inline Instance instance_from_json(const nlohmann::json& doc) {
  try {
    Instance inst;
    inst.name = doc.at("name").get<std::string>();
    const auto& app = doc.at("application");
    auto demands = app.at("demands").get<std::vector<double>>();
    std::vector<Edge> edges;
    for (const auto& e : app.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw FormatError("edge entries must be [i, j, w]");
      if (!e[0].is_number_integer() || !e[1].is_number_integer()) throw FormatError("edge endpoints must be integers");
      const auto u = e[0].get<std::int64_t>();
      const auto v = e[1].get<std::int64_t>();
      if (u < 0 || v < 0) throw FormatError("edge endpoints must be non-negative");
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), e[2].get<double>()});
    }
    inst.app = ApplicationGraph(std::move(demands), std::move(edges));
    const auto& machines = doc.at("machines");
    inst.machines = MachineGraph(machines.at("capacities").get<std::vector<double>>(),
                                 machines.at("link_cost").get<std::vector<std::vector<double>>>());
    return inst;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("invalid instance document: ") + ex.what());
  } catch (const ContractError& ex) {
    throw FormatError(std::string("invalid instance: ") + ex.what());
  }
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("instance is not valid JSON: ") + ex.what());
  }
  return instance_from_json(doc);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline Instance read_instance_file(const std::filesystem::path& path) { return parse_instance(read_text_file(path)); }

inline void write_instance_file(const std::filesystem::path& path, const Instance& inst) {
  write_text_file(path, serialize_instance(inst));
}

}  // namespace fgp
