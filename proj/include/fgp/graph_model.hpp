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
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgp {

using VertexId = std::size_t;
using MachineId = std::uint32_t;

/// Raised when a caller violates a documented precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Relative slack on capacity comparisons. Cached loads are maintained
/// incrementally and can differ from an index-ordered sum by a few ulps.
inline constexpr double kCapacitySlack = 1e-9;

inline bool within_capacity(double load, double capacity) noexcept {
  return load <= capacity + kCapacitySlack * std::max(1.0, capacity);
}

struct Edge {
  VertexId u;
  VertexId v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected component graph. Vertices carry resource demands, edges carry
/// communication volume. Immutable after construction.
class ApplicationGraph {
 public:
  struct Incident {
    VertexId other;
    double weight;
  };

  ApplicationGraph() = default;

  /// Edges are normalized so that u < v. Self-loops, duplicate pairs,
  /// out-of-range endpoints, negative demands and non-positive weights are
  /// rejected with ContractError.
  ApplicationGraph(std::vector<double> demands, std::vector<Edge> edges)
      : demands_(std::move(demands)), edges_(std::move(edges)) {
    if (demands_.empty()) throw ContractError("application graph needs at least one vertex");
    for (double r : demands_) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw ContractError("vertex demand must be finite and >= 0");
    }
    const std::size_t n = demands_.size();
    for (Edge& e : edges_) {
      if (e.u == e.v) throw ContractError("self-loop in application graph");
      if (e.u >= n || e.v >= n) throw ContractError("edge endpoint out of range");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) throw ContractError("edge weight must be finite and > 0");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(edges_.size());
    for (const Edge& e : edges_) pairs.emplace_back(e.u, e.v);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
      throw ContractError("duplicate edge in application graph");
    }
    build_adjacency();
  }

  std::size_t vertex_count() const noexcept { return demands_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const double> demands() const noexcept { return demands_; }
  double demand(VertexId v) const { return demands_[v]; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Incident> neighbors(VertexId v) const {
    return std::span<const Incident>(incident_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  double total_demand() const { return std::accumulate(demands_.begin(), demands_.end(), 0.0); }

  double max_demand() const { return *std::max_element(demands_.begin(), demands_.end()); }

 private:
  void build_adjacency() {
    const std::size_t n = demands_.size();
    offsets_.assign(n + 1, 0);
    for (const Edge& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incident_.resize(2 * edges_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
      incident_[cursor[e.u]++] = {e.v, e.weight};
      incident_[cursor[e.v]++] = {e.u, e.weight};
    }
  }

  std::vector<double> demands_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Incident> incident_;
};

/// Heterogeneous machine fleet: capacities plus a dense symmetric link-cost
/// matrix with a zero diagonal.
class MachineGraph {
 public:
  MachineGraph() = default;

  MachineGraph(std::vector<double> capacities, std::vector<std::vector<double>> link_cost)
      : capacities_(std::move(capacities)) {
    const std::size_t m = capacities_.size();
    if (m == 0) throw ContractError("machine graph needs at least one machine");
    for (double c : capacities_) {
      if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("machine capacity must be finite and > 0");
    }
    if (link_cost.size() != m) throw ContractError("link cost matrix must be square");
    link_cost_.resize(m * m);
    for (std::size_t k = 0; k < m; ++k) {
      if (link_cost[k].size() != m) throw ContractError("link cost matrix must be square");
      for (std::size_t l = 0; l < m; ++l) {
        const double b = link_cost[k][l];
        if (!(b >= 0.0) || !std::isfinite(b)) throw ContractError("link cost must be finite and >= 0");
        link_cost_[k * m + l] = b;
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (link_cost_[k * m + k] != 0.0) throw ContractError("link cost diagonal must be zero");
      for (std::size_t l = k + 1; l < m; ++l) {
        if (link_cost_[k * m + l] != link_cost_[l * m + k]) throw ContractError("link cost matrix must be symmetric");
      }
    }
  }

  std::size_t machine_count() const noexcept { return capacities_.size(); }
  std::span<const double> capacities() const noexcept { return capacities_; }
  double capacity(MachineId k) const { return capacities_[k]; }
  double link_cost(MachineId k, MachineId l) const { return link_cost_[k * capacities_.size() + l]; }

  std::span<const double> link_row(MachineId k) const {
    return std::span<const double>(link_cost_).subspan(k * capacities_.size(), capacities_.size());
  }

  std::vector<std::vector<double>> link_matrix() const {
    const std::size_t m = capacities_.size();
    std::vector<std::vector<double>> out(m);
    for (std::size_t k = 0; k < m; ++k) out[k].assign(link_cost_.begin() + k * m, link_cost_.begin() + (k + 1) * m);
    return out;
  }

  double total_capacity() const { return std::accumulate(capacities_.begin(), capacities_.end(), 0.0); }

  double max_capacity() const { return *std::max_element(capacities_.begin(), capacities_.end()); }

 private:
  std::vector<double> capacities_;
  std::vector<double> link_cost_;  // row-major
};

struct Instance {
  std::string name;
  ApplicationGraph app;
  MachineGraph machines;
};

namespace detail {

inline void check_genes(const ApplicationGraph& app, const MachineGraph& machines,
                        std::span<const MachineId> genes) {
  if (genes.size() != app.vertex_count()) throw ContractError("gene vector length differs from vertex count");
  for (MachineId g : genes) {
    if (g >= machines.machine_count()) throw ContractError("gene value out of machine range");
  }
}

}  // namespace detail

/// Graph cut size: sum over undirected edges of w_ij * b[g_i][g_j]. Each edge
/// is counted once. Co-located endpoints contribute nothing since b has a
/// zero diagonal.
inline double cut_cost(const ApplicationGraph& app, const MachineGraph& machines,
                       std::span<const MachineId> genes) {
  detail::check_genes(app, machines, genes);
  double cost = 0.0;
  for (const Edge& e : app.edges()) {
    const MachineId a = genes[e.u];
    const MachineId b = genes[e.v];
    if (a != b) cost += e.weight * machines.link_cost(a, b);
  }
  return cost;
}

/// Per-machine load, summed in vertex index order.
inline std::vector<double> machine_loads(const ApplicationGraph& app, const MachineGraph& machines,
                                         std::span<const MachineId> genes) {
  detail::check_genes(app, machines, genes);
  std::vector<double> loads(machines.machine_count(), 0.0);
  for (VertexId i = 0; i < genes.size(); ++i) loads[genes[i]] += app.demand(i);
  return loads;
}

/// Capacity constraint: every machine's summed demand fits its capacity.
inline bool is_feasible(const ApplicationGraph& app, const MachineGraph& machines,
                        std::span<const MachineId> genes) {
  const std::vector<double> loads = machine_loads(app, machines, genes);
  for (std::size_t k = 0; k < loads.size(); ++k) {
    if (!within_capacity(loads[k], machines.capacity(static_cast<MachineId>(k)))) return false;
  }
  return true;
}

inline double cut_cost(const Instance& inst, std::span<const MachineId> genes) {
  return cut_cost(inst.app, inst.machines, genes);
}

inline bool is_feasible(const Instance& inst, std::span<const MachineId> genes) {
  return is_feasible(inst.app, inst.machines, genes);
}

/// Genotype with cached per-machine loads and cached cut cost.
class Assignment {
 public:
  Assignment() = default;

  Assignment(const Instance& inst, std::vector<MachineId> genes) : genes_(std::move(genes)) {
    refresh(inst);
  }

  /// Recompute both caches from scratch.
  void refresh(const Instance& inst) {
    loads_ = machine_loads(inst.app, inst.machines, genes_);
    cost_ = cut_cost(inst.app, inst.machines, genes_);
  }

  std::span<const MachineId> genes() const noexcept { return genes_; }
  MachineId gene(VertexId v) const { return genes_[v]; }
  std::size_t size() const noexcept { return genes_.size(); }
  std::span<const double> loads() const noexcept { return loads_; }
  double load(MachineId k) const { return loads_[k]; }
  double cost() const noexcept { return cost_; }

  bool feasible(const Instance& inst) const {
    for (std::size_t k = 0; k < loads_.size(); ++k) {
      if (!within_capacity(loads_[k], inst.machines.capacity(static_cast<MachineId>(k)))) return false;
    }
    return true;
  }

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.genes_ == b.genes_ && a.loads_ == b.loads_ && a.cost_ == b.cost_;
  }

 private:
  friend void apply_move(const Instance&, Assignment&, VertexId, MachineId, double);

  std::vector<MachineId> genes_;
  std::vector<double> loads_;
  double cost_ = 0.0;
};

/// Cost change of moving `vertex` to `new_machine`. Touches only the edges
/// incident to `vertex`.
inline double delta_cost(const Instance& inst, const Assignment& a, VertexId vertex, MachineId new_machine) {
  const MachineId old_machine = a.gene(vertex);
  if (old_machine == new_machine) return 0.0;
  const auto old_row = inst.machines.link_row(old_machine);
  const auto new_row = inst.machines.link_row(new_machine);
  const auto genes = a.genes();
  double delta = 0.0;
  for (const auto& nb : inst.app.neighbors(vertex)) {
    const MachineId other = genes[nb.other];
    delta += nb.weight * (new_row[other] - old_row[other]);
  }
  return delta;
}

/// True when moving `vertex` onto `new_machine` keeps that machine within
/// capacity. Staying put always fits.
inline bool move_fits(const Instance& inst, const Assignment& a, VertexId vertex, MachineId new_machine) {
  if (a.gene(vertex) == new_machine) return true;
  return within_capacity(a.load(new_machine) + inst.app.demand(vertex), inst.machines.capacity(new_machine));
}

/// Reassign `vertex` and update the caches. `delta` must be the value
/// returned by delta_cost for the same move. Capacity is not checked here.
inline void apply_move(const Instance& inst, Assignment& a, VertexId vertex, MachineId new_machine, double delta) {
  const MachineId old_machine = a.genes_[vertex];
  if (old_machine == new_machine) return;
  const double r = inst.app.demand(vertex);
  a.loads_[old_machine] -= r;
  a.loads_[new_machine] += r;
  a.genes_[vertex] = new_machine;
  a.cost_ += delta;
}

inline void apply_move(const Instance& inst, Assignment& a, VertexId vertex, MachineId new_machine) {
  apply_move(inst, a, vertex, new_machine, delta_cost(inst, a, vertex, new_machine));
}

/// Fraction of positions with equal genes.
inline double similarity(const Assignment& x1, const Assignment& x2) {
  if (x1.size() != x2.size()) throw ContractError("similarity needs equal genotype lengths");
  if (x1.size() == 0) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < x1.size(); ++i) same += x1.gene(i) == x2.gene(i);
  return static_cast<double>(same) / static_cast<double>(x1.size());
}

}  // namespace fgp
