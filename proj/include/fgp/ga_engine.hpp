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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fgp/graph_model.hpp"
#include "fgp/rng.hpp"
#include "fgp/run_report.hpp"

namespace fgp {

struct GaParams {
  std::size_t population_size = 20;
  std::size_t max_generations = 6000;
  double similarity_threshold = 0.95;
  std::size_t random_restart_interval = 50;
  std::size_t twin_removal_interval = 100;
  std::size_t tournament_size = 5;
  double greedy_mutation_rate = 0.8;
  double improvement_threshold = 0.001;
  double restart_fraction = 0.5;
  std::size_t init_attempt_limit = 0;  // per gene; 0 means 100 * machine count
  std::uint64_t rng_seed = 0;

  /// Defaults with the generation budget chosen by instance size.
  static GaParams for_vertex_count(std::size_t vertex_count) {
    GaParams p;
    p.max_generations = vertex_count <= 500 ? 6000 : 3000;
    return p;
  }

  void validate() const {
    if (population_size == 0) throw ContractError("population_size must be positive");
    if (max_generations == 0) throw ContractError("max_generations must be positive");
    if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
      throw ContractError("similarity_threshold must lie in (0, 1]");
    }
    if (random_restart_interval == 0 || twin_removal_interval == 0) {
      throw ContractError("restart and twin removal intervals must be positive");
    }
    if (tournament_size == 0 || tournament_size > population_size) {
      throw ContractError("tournament_size must lie in [1, population_size]");
    }
    if (!(greedy_mutation_rate >= 0.0 && greedy_mutation_rate <= 1.0)) {
      throw ContractError("greedy_mutation_rate must lie in [0, 1]");
    }
    if (!(improvement_threshold >= 0.0)) throw ContractError("improvement_threshold must be >= 0");
    if (!(restart_fraction > 0.0 && restart_fraction < 1.0)) {
      throw ContractError("restart_fraction must lie in (0, 1)");
    }
  }
};

/// Randomized initialization could not place every component. This does not
/// prove the instance infeasible.
class InitializationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws a feasible individual: for each gene in order, machines are drawn
/// uniformly until one has room for the component. A gene that exhausts
/// `attempt_limit` draws restarts the whole individual; after
/// `restart_limit` restarts InitializationFailure is thrown.
inline Assignment initialize_individual(const Instance& inst, Rng& rng, std::size_t attempt_limit,
                                        std::size_t restart_limit) {
  const std::size_t n = inst.app.vertex_count();
  const std::size_t m = inst.machines.machine_count();
  if (attempt_limit == 0) attempt_limit = 100 * m;
  std::vector<MachineId> genes(n);
  std::vector<double> loads(m);
  for (std::size_t restart = 0; restart < restart_limit; ++restart) {
    std::fill(loads.begin(), loads.end(), 0.0);
    bool placed_all = true;
    for (VertexId i = 0; i < n && placed_all; ++i) {
      const double r = inst.app.demand(i);
      bool placed = false;
      for (std::size_t draw = 0; draw < attempt_limit; ++draw) {
        const auto k = static_cast<MachineId>(rng.uniform_index(m));
        if (within_capacity(loads[k] + r, inst.machines.capacity(k))) {
          genes[i] = k;
          loads[k] += r;
          placed = true;
          break;
        }
      }
      placed_all = placed;
    }
    if (placed_all) return Assignment(inst, genes);
  }
  throw InitializationFailure("randomized initialization found no feasible assignment for instance '" +
                              inst.name + "'");
}

inline Assignment initialize_individual(const Instance& inst, const GaParams& params, Rng& rng) {
  return initialize_individual(inst, rng, params.init_attempt_limit, params.population_size * 10);
}

/// Two independent tournaments. Within a tournament, `k` distinct members are
/// drawn and the cheapest wins (first drawn on ties). Returns indices.
inline std::pair<std::size_t, std::size_t> tournament_select(std::span<const Assignment> population, std::size_t k,
                                                             Rng& rng) {
  const std::size_t n = population.size();
  if (k == 0 || k > n) throw ContractError("tournament size must lie in [1, population size]");
  std::vector<std::size_t> idx(n);
  auto one = [&]() {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::size_t winner = n;
    for (std::size_t t = 0; t < k; ++t) {
      std::swap(idx[t], idx[t + rng.uniform_index(n - t)]);
      const std::size_t c = idx[t];
      if (winner == n || population[c].cost() < population[winner].cost()) winner = c;
    }
    return winner;
  };
  const std::size_t first = one();
  const std::size_t second = one();
  return {first, second};
}

/// One-point crossover at `cut`: the first child takes genes [0, cut) from
/// `p1` and the rest from `p2`; the second child is the mirror image.
inline std::pair<std::vector<MachineId>, std::vector<MachineId>> crossover_at(const Assignment& p1,
                                                                                const Assignment& p2,
                                                                                std::size_t cut) {
  if (p1.size() != p2.size()) throw ContractError("crossover parents differ in length");
  if (cut > p1.size()) throw ContractError("crossover point out of range");
  std::vector<MachineId> c1(p1.genes().begin(), p1.genes().end());
  std::vector<MachineId> c2(p2.genes().begin(), p2.genes().end());
  for (std::size_t i = cut; i < c1.size(); ++i) std::swap(c1[i], c2[i]);
  return {std::move(c1), std::move(c2)};
}

/// Feasible one-point crossover. Tries up to V random cut points in [1, V-1]
/// and returns the feasible children of the first cut that yields any.
/// An empty result means every attempt overloaded some machine.
inline std::vector<Assignment> crossover(const Assignment& p1, const Assignment& p2, const Instance& inst,
                                         Rng& rng) {
  const std::size_t n = p1.size();
  std::vector<Assignment> out;
  for (std::size_t attempt = 0; attempt < n; ++attempt) {
    const std::size_t cut = n >= 2 ? 1 + rng.uniform_index(n - 1) : 0;
    auto [g1, g2] = crossover_at(p1, p2, cut);
    const bool ok1 = is_feasible(inst, g1);
    const bool ok2 = is_feasible(inst, g2);
    if (ok1) out.emplace_back(inst, std::move(g1));
    if (ok2) out.emplace_back(inst, std::move(g2));
    if (!out.empty()) return out;
  }
  return out;
}

namespace detail {

// Calls try_gene(v) on a random position, then on the remaining positions in
// random order, until one returns true. At most V distinct positions.
template <typename TryGene>
bool for_random_genes(std::size_t n, Rng& rng, TryGene&& try_gene) {
  if (n == 0) return false;
  const VertexId first = rng.uniform_index(n);
  if (try_gene(first)) return true;
  std::vector<VertexId> order;
  order.reserve(n - 1);
  for (VertexId v = 0; v < n; ++v) {
    if (v != first) order.push_back(v);
  }
  for (std::size_t t = 0; t < order.size(); ++t) {
    std::swap(order[t], order[t + rng.uniform_index(order.size() - t)]);
    if (try_gene(order[t])) return true;
  }
  return false;
}

}  // namespace detail

/// Greedy rewrite of gene `v`: every other machine is a candidate value, and
/// the one with room for the component and the lowest resulting cost wins
/// (lowest index on ties). The gene always changes when some other machine
/// has room, even if every alternative costs more. Returns false, leaving
/// `a` untouched, when no other machine has room.
inline bool greedy_gene(const Instance& inst, Assignment& a, VertexId v) {
  const auto m = static_cast<MachineId>(inst.machines.machine_count());
  const MachineId current = a.gene(v);
  std::optional<MachineId> best;
  double best_delta = 0.0;
  for (MachineId k = 0; k < m; ++k) {
    if (k == current || !move_fits(inst, a, v, k)) continue;
    const double d = delta_cost(inst, a, v, k);
    if (!best || d < best_delta) {
      best = k;
      best_delta = d;
    }
  }
  if (!best) return false;
  apply_move(inst, a, v, *best, best_delta);
  return true;
}

/// Greedy mutation of one random gene. Genes that cannot move anywhere are
/// skipped in favour of another random gene, up to V distinct positions.
/// Returns false (and leaves `a` untouched) when no gene can be moved.
inline bool greedy_mutate(const Instance& inst, Assignment& a, Rng& rng) {
  if (inst.machines.machine_count() < 2) return false;
  return detail::for_random_genes(a.size(), rng, [&](VertexId v) { return greedy_gene(inst, a, v); });
}

/// Random mutation: a random gene gets the first uniformly drawn other
/// machine that has room for it.
inline bool random_mutate(const Instance& inst, Assignment& a, Rng& rng) {
  const std::size_t m = inst.machines.machine_count();
  if (m < 2) return false;
  std::vector<MachineId> others;
  others.reserve(m - 1);
  return detail::for_random_genes(a.size(), rng, [&](VertexId v) {
    const MachineId current = a.gene(v);
    others.clear();
    for (MachineId k = 0; k < m; ++k) {
      if (k != current) others.push_back(k);
    }
    for (std::size_t t = 0; t < others.size(); ++t) {
      std::swap(others[t], others[t + rng.uniform_index(others.size() - t)]);
      if (move_fits(inst, a, v, others[t])) {
        apply_move(inst, a, v, others[t]);
        return true;
      }
    }
    return false;
  });
}

/// Pairwise sweep: whenever two kept individuals are at least
/// `similarity_threshold` alike, the later one is reinitialized. The
/// individual at `protected_index` is never touched. Returns the indices
/// that were reinitialized.
inline std::vector<std::size_t> twin_removal(std::vector<Assignment>& population, const Instance& inst,
                                             const GaParams& params, Rng& rng, std::size_t protected_index = 0) {
  const std::size_t n = population.size();
  std::vector<bool> replaced(n, false);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (replaced[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (replaced[j]) continue;
      if (similarity(population[i], population[j]) < params.similarity_threshold) continue;
      std::size_t victim = j == protected_index ? i : j;
      population[victim] = initialize_individual(inst, params, rng);
      replaced[victim] = true;
      out.push_back(victim);
      if (victim == i) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Reinitializes the ceil(restart_fraction * n) most expensive individuals,
/// never the one at `protected_index`. Returns the replaced indices.
inline std::vector<std::size_t> random_restart(std::vector<Assignment>& population, const Instance& inst,
                                               const GaParams& params, Rng& rng,
                                               std::size_t protected_index = 0) {
  const std::size_t n = population.size();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != protected_index) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return population[a].cost() > population[b].cost(); });
  const auto count = std::min(order.size(), static_cast<std::size_t>(std::ceil(params.restart_fraction * n)));
  order.resize(count);
  for (std::size_t i : order) population[i] = initialize_individual(inst, params, rng);
  std::sort(order.begin(), order.end());
  return order;
}

/// Observer hook called after every generation with the population that will
/// breed the next one (elite at index 0) and the global best.
struct NoGenerationObserver {
  void operator()(std::size_t, std::span<const Assignment>, const Assignment&) const {}
};

namespace detail {

inline Assignment breed(std::span<const Assignment> population, const Instance& inst, const GaParams& params,
                        Rng& rng) {
  std::pair<std::size_t, std::size_t> parents{0, 0};
  for (std::size_t attempt = 0; attempt < params.population_size; ++attempt) {
    parents = tournament_select(population, params.tournament_size, rng);
    auto children = crossover(population[parents.first], population[parents.second], inst, rng);
    if (children.size() == 2 && children[1].cost() < children[0].cost()) return std::move(children[1]);
    if (!children.empty()) return std::move(children[0]);
  }
  const Assignment& a = population[parents.first];
  const Assignment& b = population[parents.second];
  return b.cost() < a.cost() ? b : a;
}

inline double mean_cost(std::span<const Assignment> population) {
  double sum = 0.0;
  for (const Assignment& a : population) sum += a.cost();
  return sum / static_cast<double>(population.size());
}

inline std::size_t argmin_cost(std::span<const Assignment> population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i].cost() < population[best].cost()) best = i;
  }
  return best;
}

}  // namespace detail

/// Runs the feasibility-preserving genetic algorithm.
///
/// Each generation keeps the global best unchanged in slot 0 and fills the
/// remaining slots with children of tournament-selected parents. Every child
/// is mutated, greedily with probability `greedy_mutation_rate`, otherwise
/// randomly. Twin removal fires every `twin_removal_interval` generations;
/// a random restart fires when the relative improvement of the best cost
/// over the last `random_restart_interval` generations is at most
/// `improvement_threshold`.
template <typename Observer = NoGenerationObserver>
RunReport run_fgpga(const Instance& inst, const GaParams& params, Observer&& observer = {}) {
  params.validate();
  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.algorithm = params.greedy_mutation_rate > 0.0 ? "fgpga" : "fgpga-no-greedy";
  report.instance = inst.name;
  report.seed = params.rng_seed;

  Rng rng(params.rng_seed);
  const std::size_t n = params.population_size;
  std::vector<Assignment> population;
  population.reserve(n);
  try {
    for (std::size_t i = 0; i < n; ++i) population.push_back(initialize_individual(inst, params, rng));
  } catch (const InitializationFailure&) {
    report.status = RunStatus::init_failed;
    report.feasible = false;
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
  }

  Assignment global_best = population[detail::argmin_cost(population)];
  // best_history[g] is the global best cost after generation g (0 = initial).
  std::vector<double> best_history{global_best.cost()};
  best_history.reserve(params.max_generations + 1);
  report.trace.reserve(params.max_generations);
  std::size_t last_restart = 0;
  constexpr double kZeroGuard = 1e-12;

  std::vector<Assignment> next;
  next.reserve(n);
  for (std::size_t gen = 1; gen <= params.max_generations; ++gen) {
    next.clear();
    next.push_back(global_best);
    while (next.size() < n) {
      Assignment child = detail::breed(population, inst, params, rng);
      if (rng.bernoulli(params.greedy_mutation_rate)) {
        greedy_mutate(inst, child, rng);
      } else {
        random_mutate(inst, child, rng);
      }
      next.push_back(std::move(child));
    }
    auto update_best = [&]() {
      const std::size_t b = detail::argmin_cost(next);
      if (next[b].cost() < global_best.cost()) global_best = next[b];
    };
    update_best();

    TraceRecord rec;
    rec.step = gen;
    rec.evaluations = static_cast<std::uint64_t>(gen) * n;
    if (gen % params.twin_removal_interval == 0) {
      next[0] = global_best;
      rec.twin_removal_fired = !twin_removal(next, inst, params, rng, 0).empty();
      update_best();
    }
    if (gen - last_restart >= params.random_restart_interval) {
      const double before = best_history[gen - params.random_restart_interval];
      const double now = global_best.cost();
      const double relative = (before - now) / std::max(before, kZeroGuard);
      if (relative <= params.improvement_threshold) {
        next[0] = global_best;
        random_restart(next, inst, params, rng, 0);
        rec.restart_fired = true;
        last_restart = gen;
        update_best();
      }
    }
    next[0] = global_best;
    std::swap(population, next);
    best_history.push_back(global_best.cost());
    rec.best_cost = global_best.cost();
    rec.mean_cost = detail::mean_cost(population);
    report.trace.push_back(rec);
    observer(gen, std::span<const Assignment>(population), std::as_const(global_best));
  }

  report.status = RunStatus::ok;
  report.best_genes.assign(global_best.genes().begin(), global_best.genes().end());
  report.best_cost = cut_cost(inst, report.best_genes);
  report.feasible = is_feasible(inst, report.best_genes);
  report.final_mean_cost = detail::mean_cost(population);
  report.steps = params.max_generations;
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace fgp
