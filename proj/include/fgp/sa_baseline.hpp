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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fgp/ga_engine.hpp"
#include "fgp/graph_model.hpp"
#include "fgp/rng.hpp"
#include "fgp/run_report.hpp"

namespace fgp {

/// Simulated annealing schedule. Zero-valued fields are filled in from the
/// instance when the run starts (see resolve()).
struct SaParams {
  double initial_temperature = 0.0;  // <= 0: mean |delta| of 100 feasible moves
  double cooling_rate = 0.95;
  std::size_t epochs = 0;            // 0: match `evaluation_budget`
  std::size_t moves_per_epoch = 0;   // 0: 10 * V
  std::uint64_t evaluation_budget = 20 * 6000;
  std::uint64_t rng_seed = 0;

  /// Same total number of evaluations as a GA run with `ga`.
  static SaParams matched_to(const GaParams& ga) {
    SaParams p;
    p.evaluation_budget = static_cast<std::uint64_t>(ga.population_size) * ga.max_generations;
    p.rng_seed = ga.rng_seed;
    return p;
  }

  SaParams resolve(std::size_t vertex_count) const {
    SaParams p = *this;
    if (p.moves_per_epoch == 0) p.moves_per_epoch = 10 * vertex_count;
    if (p.epochs == 0) {
      p.epochs = static_cast<std::size_t>((p.evaluation_budget + p.moves_per_epoch - 1) / p.moves_per_epoch);
      if (p.epochs == 0) p.epochs = 1;
    }
    return p;
  }

  void validate() const {
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw ContractError("cooling_rate must lie in (0, 1)");
    if (!std::isfinite(initial_temperature)) throw ContractError("initial_temperature must be finite");
  }
};

struct Move {
  VertexId vertex;
  MachineId machine;

  friend bool operator==(const Move&, const Move&) = default;
};

/// Uniform vertex, uniform machine other than its current one. Empty when
/// there is only one machine.
inline std::optional<Move> propose_move(const Instance& inst, const Assignment& a, Rng& rng) {
  const std::size_t m = inst.machines.machine_count();
  if (m < 2 || a.size() == 0) return std::nullopt;
  const VertexId v = rng.uniform_index(a.size());
  auto k = static_cast<MachineId>(rng.uniform_index(m - 1));
  if (k >= a.gene(v)) ++k;
  return Move{v, k};
}

/// Keeps a feasible proposal; replaces an infeasible one by the first of up
/// to V * Mn fresh uniform proposals that fits. Empty means no-op.
inline std::optional<Move> repair_move(const Instance& inst, const Assignment& a, Move proposed, Rng& rng) {
  if (move_fits(inst, a, proposed.vertex, proposed.machine)) return proposed;
  const std::size_t tries = a.size() * inst.machines.machine_count();
  for (std::size_t t = 0; t < tries; ++t) {
    auto mv = propose_move(inst, a, rng);
    if (!mv) return std::nullopt;
    if (move_fits(inst, a, mv->vertex, mv->machine)) return mv;
  }
  return std::nullopt;
}

/// Mean absolute cost change over up to 100 random feasible moves from `a`.
/// Falls back to 1 when nothing informative is found.
inline double auto_temperature(const Instance& inst, const Assignment& a, Rng& rng) {
  constexpr std::size_t kSamples = 100;
  const std::size_t max_draws = kSamples * std::max<std::size_t>(1, a.size() * inst.machines.machine_count());
  double sum = 0.0;
  std::size_t got = 0;
  for (std::size_t draw = 0; draw < max_draws && got < kSamples; ++draw) {
    auto mv = propose_move(inst, a, rng);
    if (!mv) break;
    if (!move_fits(inst, a, mv->vertex, mv->machine)) continue;
    sum += std::abs(delta_cost(inst, a, mv->vertex, mv->machine));
    ++got;
  }
  const double t = got > 0 ? sum / static_cast<double>(got) : 0.0;
  return t > 0.0 ? t : 1.0;
}

struct NoStepObserver {
  void operator()(const Assignment&) const {}
};

/// Simulated annealing restricted to feasible states. An infeasible
/// proposal is swapped for a feasible random move, which then faces the same
/// Metropolis test. Geometric cooling once per epoch. `observer` sees the
/// current state after every step.
template <typename StepObserver = NoStepObserver>
RunReport run_sa(const Instance& inst, const SaParams& raw_params, StepObserver&& observer = {}) {
  raw_params.validate();
  const auto started = std::chrono::steady_clock::now();
  const SaParams params = raw_params.resolve(inst.app.vertex_count());

  RunReport report;
  report.algorithm = "sa";
  report.instance = inst.name;
  report.seed = params.rng_seed;

  Rng rng(params.rng_seed);
  Assignment state;
  try {
    state = initialize_individual(inst, rng, 0, GaParams{}.population_size * 10);
  } catch (const InitializationFailure&) {
    report.status = RunStatus::init_failed;
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
  }

  double temperature =
      params.initial_temperature > 0.0 ? params.initial_temperature : auto_temperature(inst, state, rng);
  std::vector<MachineId> best(state.genes().begin(), state.genes().end());
  double best_cost = state.cost();
  report.trace.reserve(params.epochs);

  for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
    for (std::size_t step = 0; step < params.moves_per_epoch; ++step) {
      auto proposal = propose_move(inst, state, rng);
      if (!proposal) continue;
      std::optional<Move> mv = proposal;
      if (!move_fits(inst, state, proposal->vertex, proposal->machine)) {
        ++report.repairs;
        mv = repair_move(inst, state, *proposal, rng);
        if (!mv) continue;
      }
      const double delta = delta_cost(inst, state, mv->vertex, mv->machine);
      if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temperature)) {
        apply_move(inst, state, mv->vertex, mv->machine, delta);
        if (state.cost() < best_cost) {
          best_cost = state.cost();
          best.assign(state.genes().begin(), state.genes().end());
        }
      }
      observer(std::as_const(state));
    }
    TraceRecord rec;
    rec.step = epoch;
    rec.evaluations = static_cast<std::uint64_t>(epoch) * params.moves_per_epoch;
    rec.best_cost = best_cost;
    rec.mean_cost = state.cost();
    report.trace.push_back(rec);
    temperature *= params.cooling_rate;
  }

  report.status = RunStatus::ok;
  report.best_genes = std::move(best);
  report.best_cost = cut_cost(inst, report.best_genes);
  report.feasible = is_feasible(inst, report.best_genes);
  report.final_mean_cost = state.cost();
  report.steps = params.epochs;
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace fgp
