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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fgp/experiment.hpp"
#include "fgp/instance_gen.hpp"
#include "fgp/instance_io.hpp"
#include "fgp/oracle.hpp"

namespace fs = std::filesystem;

namespace {

// "100..1000:100" or "100,200,300".
std::vector<std::size_t> parse_sizes(const std::string& spec) {
  std::vector<std::size_t> out;
  if (auto dots = spec.find(".."); dots != std::string::npos) {
    const auto colon = spec.find(':', dots);
    const std::size_t lo = std::stoul(spec.substr(0, dots));
    const std::size_t hi = std::stoul(spec.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
    const std::size_t step = colon == std::string::npos ? 1 : std::stoul(spec.substr(colon + 1));
    if (step == 0 || lo > hi) throw CLI::ValidationError("--sizes", "empty or malformed range '" + spec + "'");
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  }
  for (std::size_t v : out) {
    if (v < 2) throw CLI::ValidationError("--sizes", "instances need at least 2 vertices");
  }
  return out;
}

std::vector<fgp::Instance> generate_ladder(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  std::vector<fgp::Instance> out;
  for (std::size_t v : sizes) {
    fgp::GenParams gp;
    gp.vertex_count = v;
    gp.rng_seed = seed;
    out.push_back(fgp::generate_instance(gp));
  }
  return out;
}

std::string default_out(const char* fallback) {
  if (const char* env = std::getenv("FGPGA_OUT_DIR"); env && *env) return env;
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity-constrained application-to-machine graph partitioning: FGPGA, repaired SA, oracle"};
  app.require_subcommand(1);

  std::string sizes_spec = "100..1000:100";
  std::uint64_t seed = 42;
  std::string out_dir;

  auto* gen = app.add_subcommand("generate", "Write random power-law benchmark instances as JSON");
  gen->add_option("--sizes", sizes_spec, "Vertex counts: LO..HI:STEP or a comma list")->capture_default_str();
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory (default $FGPGA_OUT_DIR or ./instances)");

  std::vector<std::string> instance_paths;
  std::string run_sizes;
  std::uint64_t gen_seed = 42;
  std::string algorithms = "fgpga,sa";
  fgp::ExperimentConfig cfg;
  std::size_t generations = 0;
  std::size_t population = 0;
  auto* run = app.add_subcommand("run", "Run solvers over instances; write runs.csv, summary.csv, traces/");
  run->add_option("--instances", instance_paths, "Instance JSON files")->check(CLI::ExistingFile);
  run->add_option("--sizes", run_sizes, "Generate instances of these sizes instead of reading files");
  run->add_option("--gen-seed", gen_seed, "Seed for --sizes generation")->capture_default_str();
  run->add_option("--algorithms", algorithms, "Comma list of fgpga, fgpga-no-greedy, sa")->capture_default_str();
  run->add_option("--reps", cfg.repetitions, "Repetitions per (algorithm, instance)")->capture_default_str();
  run->add_option("--seed", cfg.seed_base, "Seed base; repetition k uses seed+k")->capture_default_str();
  run->add_option("--workers", cfg.workers, "Concurrent runs")->capture_default_str();
  run->add_option("--generations", generations, "GA generations (default 6000 for V<=500, else 3000)");
  run->add_option("--population", population, "GA population size (default 20)");
  run->add_flag("--timing", cfg.record_time, "Record wall-clock times in the CSV files");
  run->add_option("--out", out_dir, "Output directory (default $FGPGA_OUT_DIR or ./results)");

  std::string trace_dir;
  bool median = false;
  auto* exp = app.add_subcommand("export-traces", "Turn run traces into plot-ready series CSVs");
  exp->add_option("--in", trace_dir, "Directory written by 'run'")->required()->check(CLI::ExistingDirectory);
  exp->add_flag("--median", median, "One series per (algorithm, instance): per-step median over seeds");
  exp->add_option("--out", out_dir, "Output directory (default: the --in directory)");

  std::string oracle_path;
  std::uint64_t budget = fgp::kDefaultOracleBudget;
  auto* orc = app.add_subcommand("oracle", "Exact optimum by exhaustive enumeration (tiny instances only)");
  orc->add_option("--instance", oracle_path, "Instance JSON file")->required()->check(CLI::ExistingFile);
  orc->add_option("--budget", budget, "Maximum number of states to enumerate")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const fs::path dir = out_dir.empty() ? default_out("instances") : out_dir;
      for (const auto& inst : generate_ladder(parse_sizes(sizes_spec), seed)) {
        fgp::write_instance_file(dir / (inst.name + ".json"), inst);
        std::cout << inst.name << ": V=" << inst.app.vertex_count() << " E=" << inst.app.edge_count()
                  << " Mn=" << inst.machines.machine_count() << " sum_r=" << inst.app.total_demand()
                  << " sum_C=" << inst.machines.total_capacity() << '\n';
      }
    } else if (*run) {
      std::vector<fgp::Instance> instances;
      for (const auto& p : instance_paths) instances.push_back(fgp::read_instance_file(p));
      if (!run_sizes.empty()) {
        for (auto& inst : generate_ladder(parse_sizes(run_sizes), gen_seed)) instances.push_back(std::move(inst));
      }
      if (instances.empty()) throw CLI::ValidationError("run", "give --instances or --sizes");
      cfg.algorithms.clear();
      std::stringstream ss(algorithms);
      for (std::string a; std::getline(ss, a, ',');) cfg.algorithms.push_back(a);
      if (generations > 0) cfg.generations = generations;
      if (population > 0) cfg.population = population;
      const fs::path dir = out_dir.empty() ? default_out("results") : out_dir;
      const auto reports = fgp::run_experiment(instances, cfg);
      const auto shapes = fgp::instance_shapes(instances);
      fgp::write_experiment(dir, reports, shapes, cfg.record_time);
      std::cout << fgp::summary_csv(fgp::aggregate(reports, shapes), cfg.record_time);
    } else if (*exp) {
      const fs::path dir = out_dir.empty() ? fs::path(trace_dir) : fs::path(out_dir);
      const auto series = fgp::export_traces(trace_dir, median);
      fgp::write_text_file(dir / "series_best_cost.csv", fgp::series_csv(series.best_cost));
      fgp::write_text_file(dir / "series_log_cost.csv", fgp::series_csv(series.log_cost));
      std::cout << "wrote " << series.best_cost.size() << " points to " << (dir / "series_best_cost.csv").string()
                << '\n';
    } else if (*orc) {
      const auto inst = fgp::read_instance_file(oracle_path);
      const auto result = fgp::solve_exact(inst, budget);
      std::cout << "states " << result.states_enumerated << '\n';
      if (!result.feasible()) {
        std::cout << "infeasible\n";
        return 2;
      }
      std::cout << "optimal_cost " << fgp::format_double(*result.optimal_cost) << "\ngenes";
      for (auto g : result.optimal_genes) std::cout << ' ' << g;
      std::cout << '\n';
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
