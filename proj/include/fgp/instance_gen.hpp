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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "fgp/graph_model.hpp"
#include "fgp/rng.hpp"

namespace fgp {

struct GenParams {
  std::size_t vertex_count = 100;
  double vertex_weight_lambda = 0.1;
  double edge_weight_lambda = 0.005;
  double capacity_headroom = 1.5;
  std::vector<double> capacity_choices{100, 200, 300, 400, 500, 600, 700, 800};
  double machine_link_lambda = 0.005;
  double power_law_exponent = 2.5;
  double target_edge_factor = 2.0;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (vertex_count < 2) throw ContractError("generator needs at least two vertices");
    if (!(vertex_weight_lambda > 0.0) || !(edge_weight_lambda > 0.0) || !(machine_link_lambda > 0.0)) {
      throw ContractError("exponential rates must be positive");
    }
    if (!(capacity_headroom > 1.0)) throw ContractError("capacity_headroom must exceed 1");
    if (capacity_choices.empty()) throw ContractError("capacity_choices must not be empty");
    for (double c : capacity_choices) {
      if (!(c > 0.0)) throw ContractError("capacity choices must be positive");
    }
    if (!(power_law_exponent > 1.0)) throw ContractError("power_law_exponent must exceed 1");
    if (!(target_edge_factor > 0.0)) throw ContractError("target_edge_factor must be positive");
  }
};

namespace detail {

inline double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

// Exponential draw rounded to 3 decimals, redrawn until it lies in (lo, hi].
inline double rounded_exponential(Rng& rng, double rate, double lo, double hi) {
  for (;;) {
    const double x = round3(rng.exponential(rate));
    if (x > lo && x <= hi) return x;
  }
}

}  // namespace detail

/// Sparse connected power-law graph from a growth process.
///
/// Starts from a triangle. Each step either adds a vertex wired to an
/// existing vertex, or adds an edge between two existing vertices. Targets
/// are endpoints of uniformly random edges (so chosen proportionally to
/// degree) with probability min(1, 2 / (gamma - 1)), otherwise uniform
/// vertices. Vertex and edge steps are interleaved at random so that the
/// edge count lands near target_edge_factor * V.
///
/// Demands ~ Exp(vertex_weight_lambda), capped at the largest capacity
/// choice by redrawing; weights ~ Exp(edge_weight_lambda). Both rounded to
/// three decimals.
inline ApplicationGraph generate_application_graph(const GenParams& params, Rng& rng) {
  params.validate();
  const std::size_t n = params.vertex_count;
  const double preferential = std::min(1.0, 2.0 / (params.power_law_exponent - 1.0));

  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::vector<VertexId> endpoints;  // each edge contributes both ends
  std::unordered_set<std::uint64_t> seen;
  auto key = [n](VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(a) * n + b;
  };
  auto add_edge = [&](VertexId a, VertexId b) {
    if (a == b || !seen.insert(key(a, b)).second) return false;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
    endpoints.push_back(a);
    endpoints.push_back(b);
    return true;
  };

  const std::size_t seed_vertices = std::min<std::size_t>(3, n);
  for (VertexId a = 0; a < seed_vertices; ++a) {
    for (VertexId b = a + 1; b < seed_vertices; ++b) add_edge(a, b);
  }
  std::size_t vertices = seed_vertices;
  auto pick_target = [&]() -> VertexId {
    if (rng.uniform01() < preferential) return endpoints[rng.uniform_index(endpoints.size())];
    return rng.uniform_index(vertices);
  };

  const auto target_edges = std::max<std::size_t>(
      n - 1, static_cast<std::size_t>(std::llround(params.target_edge_factor * static_cast<double>(n))));
  std::size_t vertex_steps = n - seed_vertices;
  std::size_t edge_steps = target_edges > pairs.size() + vertex_steps ? target_edges - pairs.size() - vertex_steps : 0;
  constexpr int kEdgeRetries = 16;

  while (vertex_steps + edge_steps > 0) {
    const bool grow = rng.uniform_index(vertex_steps + edge_steps) < vertex_steps;
    if (grow) {
      const VertexId target = pick_target();
      add_edge(vertices, target);
      ++vertices;
      --vertex_steps;
    } else {
      for (int t = 0; t < kEdgeRetries; ++t) {
        if (add_edge(pick_target(), pick_target())) break;
      }
      --edge_steps;
    }
  }

  const double demand_cap = *std::max_element(params.capacity_choices.begin(), params.capacity_choices.end());
  std::vector<double> demands(n);
  for (double& r : demands) r = detail::rounded_exponential(rng, params.vertex_weight_lambda, -1.0, demand_cap);
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    edges.push_back({a, b, detail::rounded_exponential(rng, params.edge_weight_lambda, 0.0,
                                                       std::numeric_limits<double>::infinity())});
  }
  return ApplicationGraph(std::move(demands), std::move(edges));
}

/// Machine fleet sized to `capacity_headroom` times the total demand.
///
/// Capacities are drawn from `capacity_choices` until the sum reaches the
/// target; if no machine can host the largest component, the smallest
/// sufficient choice is appended. Links form a random spanning tree plus
/// ceil(Mn/2) extra random edges with Exp(machine_link_lambda) costs, and
/// the dense cost matrix is the all-pairs shortest-path closure.
inline MachineGraph generate_machine_graph(const ApplicationGraph& app, const GenParams& params, Rng& rng) {
  params.validate();
  const double need = params.capacity_headroom * app.total_demand();
  std::vector<double> caps;
  double total = 0.0;
  do {
    const double c = params.capacity_choices[rng.uniform_index(params.capacity_choices.size())];
    caps.push_back(c);
    total += c;
  } while (total < need);
  const double biggest = app.max_demand();
  if (*std::max_element(caps.begin(), caps.end()) < biggest) {
    double fit = std::numeric_limits<double>::infinity();
    for (double c : params.capacity_choices) {
      if (c >= biggest) fit = std::min(fit, c);
    }
    if (!std::isfinite(fit)) throw ContractError("no capacity choice can host the largest component");
    caps.push_back(fit);
  }

  const std::size_t m = caps.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dist(m, std::vector<double>(m, kInf));
  for (std::size_t k = 0; k < m; ++k) dist[k][k] = 0.0;
  auto link_weight = [&]() { return detail::rounded_exponential(rng, params.machine_link_lambda, 0.0, kInf); };

  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < m; ++k) order[k] = k;
  for (std::size_t t = 0; t + 1 < m; ++t) std::swap(order[t], order[t + rng.uniform_index(m - t)]);
  for (std::size_t t = 1; t < m; ++t) {
    const std::size_t a = order[t];
    const std::size_t b = order[rng.uniform_index(t)];
    dist[a][b] = dist[b][a] = link_weight();
  }
  if (m >= 3) {
    const std::size_t extra = (m + 1) / 2;
    std::size_t added = 0;
    for (std::size_t attempt = 0; attempt < 20 * extra && added < extra; ++attempt) {
      const std::size_t a = rng.uniform_index(m);
      const std::size_t b = rng.uniform_index(m);
      if (a == b || std::isfinite(dist[a][b])) continue;
      dist[a][b] = dist[b][a] = link_weight();
      ++added;
    }
  }

  for (std::size_t via = 0; via < m; ++via) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        const double alt = dist[a][via] + dist[via][b];
        if (alt < dist[a][b]) dist[a][b] = alt;
      }
    }
  }
  // Floating-point sums along the two directions may differ in the last ulp.
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) dist[b][a] = dist[a][b];
  }
  return MachineGraph(std::move(caps), std::move(dist));
}

inline Instance generate_instance(const GenParams& params) {
  Rng rng(params.rng_seed);
  Instance inst;
  inst.name = "pl-v" + std::to_string(params.vertex_count) + "-s" + std::to_string(params.rng_seed);
  inst.app = generate_application_graph(params, rng);
  inst.machines = generate_machine_graph(inst.app, params, rng);
  return inst;
}

}  // namespace fgp
