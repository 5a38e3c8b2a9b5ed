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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fgp/graph_model.hpp"

namespace fgp {

struct OracleResult {
  std::optional<double> optimal_cost;  // empty: no feasible assignment exists
  std::vector<MachineId> optimal_genes;
  std::uint64_t states_enumerated = 0;

  bool feasible() const { return optimal_cost.has_value(); }
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 100'000'000;

/// Mn^V, or nullopt when it exceeds `cap`.
inline std::optional<std::uint64_t> state_space_size(std::size_t vertices, std::size_t machines, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < vertices; ++i) {
    if (total > cap / machines) return std::nullopt;
    total *= machines;
  }
  return total <= cap ? std::optional<std::uint64_t>(total) : std::nullopt;
}

/// Exhaustive search over all Mn^V gene vectors. States are visited in
/// lexicographic order and only a strictly better cost replaces the
/// incumbent, so the reported optimum is the lexicographically smallest.
inline OracleResult solve_exact(const Instance& inst, std::uint64_t state_budget = kDefaultOracleBudget) {
  const std::size_t n = inst.app.vertex_count();
  const std::size_t m = inst.machines.machine_count();
  const auto states = state_space_size(n, m, state_budget);
  if (!states) {
    throw OracleBudgetExceeded("state space " + std::to_string(m) + "^" + std::to_string(n) +
                               " exceeds the oracle budget of " + std::to_string(state_budget));
  }

  OracleResult result;
  std::vector<MachineId> genes(n, 0);
  for (;;) {
    ++result.states_enumerated;
    if (is_feasible(inst, genes)) {
      const double cost = cut_cost(inst, genes);
      if (!result.optimal_cost || cost < *result.optimal_cost) {
        result.optimal_cost = cost;
        result.optimal_genes = genes;
      }
    }
    // Odometer step, last position fastest.
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++genes[pos] < m) break;
      genes[pos] = 0;
      if (pos == 0) return result;
    }
  }
}

}  // namespace fgp
