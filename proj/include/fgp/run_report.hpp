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
#include <string>
#include <vector>

#include "fgp/graph_model.hpp"

namespace fgp {

/// One row of a convergence trace. `step` is the generation (GA) or epoch
/// (SA); `evaluations` is the cumulative candidate-evaluation budget spent.
struct TraceRecord {
  std::size_t step = 0;
  std::uint64_t evaluations = 0;
  double best_cost = 0.0;
  double mean_cost = 0.0;  // population mean (GA) or current state cost (SA)
  bool restart_fired = false;
  bool twin_removal_fired = false;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class RunStatus { ok, init_failed };

struct RunReport {
  std::string algorithm;
  std::string instance;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::ok;
  bool feasible = false;
  double best_cost = 0.0;
  double final_mean_cost = 0.0;
  std::vector<MachineId> best_genes;
  std::size_t steps = 0;
  double wall_time_ms = 0.0;
  std::uint64_t repairs = 0;  // SA only: how often a proposal had to be replaced
  std::vector<TraceRecord> trace;
};

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok:
      return "ok";
    case RunStatus::init_failed:
      return "init_failed";
  }
  return "unknown";
}

}  // namespace fgp
