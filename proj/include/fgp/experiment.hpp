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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "fgp/ga_engine.hpp"
#include "fgp/graph_model.hpp"
#include "fgp/instance_io.hpp"
#include "fgp/run_report.hpp"
#include "fgp/sa_baseline.hpp"

namespace fgp {

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> ids{"fgpga", "fgpga-no-greedy", "sa"};
  return ids;
}

inline bool is_known_algorithm(const std::string& id) {
  const auto& ids = known_algorithms();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

struct ExperimentConfig {
  std::vector<std::string> algorithms{"fgpga", "sa"};
  std::size_t repetitions = 10;
  std::uint64_t seed_base = 0;
  std::size_t workers = 1;
  std::optional<std::size_t> generations;  // overrides the size-based default
  std::optional<std::size_t> population;
  bool record_time = false;  // wall times make CSV output non-reproducible

  void validate() const {
    if (repetitions == 0) throw ContractError("repetitions must be >= 1");
    if (algorithms.empty()) throw ContractError("at least one algorithm is required");
    for (const auto& a : algorithms) {
      if (!is_known_algorithm(a)) throw ContractError("unknown algorithm '" + a + "'");
    }
    if (generations && *generations == 0) throw ContractError("generations must be positive");
    if (population && *population == 0) throw ContractError("population must be positive");
  }
};

/// Repetition k of an experiment runs with seed seed_base + k, so adding
/// repetitions never changes earlier runs.
inline std::uint64_t run_seed(std::uint64_t seed_base, std::size_t repetition) { return seed_base + repetition; }

inline GaParams ga_params_for(const Instance& inst, const ExperimentConfig& cfg, std::uint64_t seed) {
  GaParams p = GaParams::for_vertex_count(inst.app.vertex_count());
  if (cfg.generations) p.max_generations = *cfg.generations;
  if (cfg.population) p.population_size = *cfg.population;
  p.tournament_size = std::min(p.tournament_size, p.population_size);
  p.rng_seed = seed;
  return p;
}

inline RunReport run_algorithm(const Instance& inst, const std::string& algorithm, const ExperimentConfig& cfg,
                               std::uint64_t seed) {
  GaParams ga = ga_params_for(inst, cfg, seed);
  if (algorithm == "fgpga") return run_fgpga(inst, ga);
  if (algorithm == "fgpga-no-greedy") {
    ga.greedy_mutation_rate = 0.0;
    return run_fgpga(inst, ga);
  }
  if (algorithm == "sa") return run_sa(inst, SaParams::matched_to(ga));
  throw ContractError("unknown algorithm '" + algorithm + "'");
}

/// Re-checks a solver's answer against the instance. A report whose genes
/// are missing, overload a machine, or disagree with the claimed cost is
/// marked infeasible.
inline void verify_report(const Instance& inst, RunReport& report) {
  if (report.status != RunStatus::ok || report.best_genes.size() != inst.app.vertex_count()) {
    report.feasible = false;
    return;
  }
  report.feasible = is_feasible(inst, report.best_genes);
  const double fresh = cut_cost(inst, report.best_genes);
  if (std::abs(fresh - report.best_cost) > 1e-9 * std::max(1.0, std::abs(fresh))) report.feasible = false;
}

/// Runs every (algorithm, instance, repetition) cell on up to `workers`
/// threads. The result is sorted by algorithm, instance name, seed.
inline std::vector<RunReport> run_experiment(const std::vector<Instance>& instances, const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    const std::string* algorithm;
    const Instance* instance;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& algorithm : cfg.algorithms) {
    for (const auto& inst : instances) {
      for (std::size_t k = 0; k < cfg.repetitions; ++k) cells.push_back({&algorithm, &inst, run_seed(cfg.seed_base, k)});
    }
  }
  std::vector<RunReport> reports(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        reports[i] = run_algorithm(*cells[i].instance, *cells[i].algorithm, cfg, cells[i].seed);
        verify_report(*cells[i].instance, reports[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::stable_sort(reports.begin(), reports.end(), [](const RunReport& a, const RunReport& b) {
    return std::tie(a.algorithm, a.instance, a.seed) < std::tie(b.algorithm, b.instance, b.seed);
  });
  return reports;
}

/// Best and mean of the per-run best costs of one (algorithm, instance) cell.
struct AggregateRow {
  std::string algorithm;
  std::string instance;
  std::size_t vertex_count = 0;
  std::size_t machine_count = 0;
  std::size_t runs = 0;
  std::size_t successful_runs = 0;
  std::optional<double> best_cost;
  std::optional<double> avg_cost;
  double wall_time_ms = 0.0;
  bool feasible = true;
};

struct InstanceShape {
  std::size_t vertex_count = 0;
  std::size_t machine_count = 0;
};

inline std::map<std::string, InstanceShape> instance_shapes(const std::vector<Instance>& instances) {
  std::map<std::string, InstanceShape> out;
  for (const auto& inst : instances) out[inst.name] = {inst.app.vertex_count(), inst.machines.machine_count()};
  return out;
}

inline std::vector<AggregateRow> aggregate(const std::vector<RunReport>& reports,
                                           const std::map<std::string, InstanceShape>& shapes) {
  std::map<std::pair<std::string, std::string>, AggregateRow> cells;
  for (const RunReport& r : reports) {
    AggregateRow& row = cells[{r.algorithm, r.instance}];
    row.algorithm = r.algorithm;
    row.instance = r.instance;
    if (auto it = shapes.find(r.instance); it != shapes.end()) {
      row.vertex_count = it->second.vertex_count;
      row.machine_count = it->second.machine_count;
    }
    ++row.runs;
    row.wall_time_ms += r.wall_time_ms;
    row.feasible = row.feasible && r.feasible;
    if (r.status != RunStatus::ok) continue;
    ++row.successful_runs;
    row.best_cost = row.best_cost ? std::min(*row.best_cost, r.best_cost) : r.best_cost;
    row.avg_cost = row.avg_cost.value_or(0.0) + r.best_cost;
  }
  std::vector<AggregateRow> out;
  for (auto& [key, row] : cells) {
    if (row.avg_cost) *row.avg_cost /= static_cast<double>(row.successful_runs);
    out.push_back(std::move(row));
  }
  return out;
}

inline constexpr const char* kCsvHeader = "algorithm,instance,V,Mn,seed,best_cost,avg_cost,wall_time_ms,feasible,status\n";

inline std::string runs_csv(const std::vector<RunReport>& reports, const std::map<std::string, InstanceShape>& shapes,
                            bool record_time) {
  std::ostringstream out;
  out << kCsvHeader;
  for (const RunReport& r : reports) {
    InstanceShape shape;
    if (auto it = shapes.find(r.instance); it != shapes.end()) shape = it->second;
    out << r.algorithm << ',' << r.instance << ',' << shape.vertex_count << ',' << shape.machine_count << ','
        << r.seed << ',' << (r.status == RunStatus::ok ? format_double(r.best_cost) : "") << ",,"
        << (record_time ? format_double(r.wall_time_ms) : "") << ',' << (r.feasible ? "true" : "false") << ','
        << to_string(r.status) << '\n';
  }
  return out.str();
}

inline std::string summary_csv(const std::vector<AggregateRow>& rows, bool record_time) {
  std::ostringstream out;
  out << kCsvHeader;
  for (const AggregateRow& row : rows) {
    out << row.algorithm << ',' << row.instance << ',' << row.vertex_count << ',' << row.machine_count << ",all,"
        << (row.best_cost ? format_double(*row.best_cost) : "") << ','
        << (row.avg_cost ? format_double(*row.avg_cost) : "") << ','
        << (record_time ? format_double(row.wall_time_ms) : "") << ',' << (row.feasible ? "true" : "false") << ','
        << (row.successful_runs == row.runs ? "ok" : "init_failed") << '\n';
  }
  return out.str();
}

inline constexpr const char* kTraceHeader = "step,evaluations,best_cost,mean_cost,restart,twin_removal\n";

inline std::string trace_csv(const RunReport& report) {
  std::ostringstream out;
  out << kTraceHeader;
  for (const TraceRecord& t : report.trace) {
    out << t.step << ',' << t.evaluations << ',' << format_double(t.best_cost) << ',' << format_double(t.mean_cost)
        << ',' << int{t.restart_fired} << ',' << int{t.twin_removal_fired} << '\n';
  }
  return out.str();
}

inline std::string trace_file_name(const std::string& algorithm, const std::string& instance, std::uint64_t seed) {
  return algorithm + "__" + instance + "__" + std::to_string(seed) + ".csv";
}

/// Writes runs.csv, summary.csv and traces/<algorithm>__<instance>__<seed>.csv.
inline void write_experiment(const std::filesystem::path& out_dir, const std::vector<RunReport>& reports,
                             const std::map<std::string, InstanceShape>& shapes, bool record_time) {
  std::filesystem::create_directories(out_dir / "traces");
  write_text_file(out_dir / "runs.csv", runs_csv(reports, shapes, record_time));
  write_text_file(out_dir / "summary.csv", summary_csv(aggregate(reports, shapes), record_time));
  for (const RunReport& r : reports) {
    if (r.status != RunStatus::ok) continue;
    write_text_file(out_dir / "traces" / trace_file_name(r.algorithm, r.instance, r.seed), trace_csv(r));
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  return rows;
}

}  // namespace detail

struct SeriesPoint {
  std::size_t x = 0;
  double y = 0.0;
  std::string series;
};

/// Missing trace files named in runs.csv.
class MissingTraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceExport {
  std::vector<SeriesPoint> best_cost;
  std::vector<SeriesPoint> log_cost;  // log10(1 + cost), defined at zero cost
};

/// Builds plot-ready series from the traces of a finished experiment. With
/// `median` the runs of each (algorithm, instance) are collapsed to the
/// per-step median, giving one series per algorithm and instance; otherwise
/// every run is its own series labelled algorithm/instance/seed.
inline TraceExport export_traces(const std::filesystem::path& run_dir, bool median) {
  struct Run {
    std::string algorithm, instance, seed;
  };
  std::vector<Run> runs;
  for (const auto& row : detail::read_csv_rows(run_dir / "runs.csv")) {
    if (row.size() < 10) throw FormatError("malformed row in runs.csv");
    if (row[9] != "ok") continue;
    runs.push_back({row[0], row[1], row[4]});
  }
  std::vector<std::string> missing;
  std::map<std::string, std::vector<std::vector<double>>> grouped;  // label -> per-run series
  std::vector<std::string> order;
  for (const Run& r : runs) {
    const auto path = run_dir / "traces" / (r.algorithm + "__" + r.instance + "__" + r.seed + ".csv");
    if (!std::filesystem::exists(path)) {
      missing.push_back(r.algorithm + "/" + r.instance + "/" + r.seed);
      continue;
    }
    std::vector<double> ys;
    for (const auto& row : detail::read_csv_rows(path)) {
      if (row.size() < 3) throw FormatError("malformed trace " + path.string());
      ys.push_back(std::stod(row[2]));
    }
    const std::string label = median ? r.algorithm + "/" + r.instance : r.algorithm + "/" + r.instance + "/" + r.seed;
    if (!grouped.count(label)) order.push_back(label);
    grouped[label].push_back(std::move(ys));
  }
  if (!missing.empty()) {
    std::string msg = "missing trace for run(s):";
    for (const auto& m : missing) msg += " " + m;
    throw MissingTraceError(msg);
  }

  TraceExport out;
  for (const auto& label : order) {
    const auto& series = grouped[label];
    std::size_t len = series.front().size();
    for (const auto& s : series) len = std::min(len, s.size());
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<double> column;
      for (const auto& s : series) column.push_back(s[i]);
      std::sort(column.begin(), column.end());
      const std::size_t c = column.size();
      const double y = c % 2 == 1 ? column[c / 2] : 0.5 * (column[c / 2 - 1] + column[c / 2]);
      out.best_cost.push_back({i + 1, y, label});
      out.log_cost.push_back({i + 1, std::log10(1.0 + y), label});
    }
  }
  return out;
}

inline std::string series_csv(const std::vector<SeriesPoint>& points) {
  std::ostringstream out;
  out << "x,y,series\n";
  for (const auto& p : points) out << p.x << ',' << format_double(p.y) << ',' << p.series << '\n';
  return out.str();
}

}  // namespace fgp
