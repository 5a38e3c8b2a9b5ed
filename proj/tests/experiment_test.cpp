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


#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "fgp/experiment.hpp"
#include "fgp/instance_gen.hpp"
#include "fgp/instance_io.hpp"
#include "test_support.hpp"

namespace fgp {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("fgpga_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<Instance> small_instances() {
  std::vector<Instance> out;
  for (std::uint64_t s = 0; s < 3; ++s) {
    GenParams gp;
    gp.vertex_count = 20 + 5 * s;
    gp.rng_seed = s;
    out.push_back(generate_instance(gp));
  }
  return out;
}

ExperimentConfig quick_config() {
  ExperimentConfig cfg;
  cfg.algorithms = {"fgpga", "sa"};
  cfg.repetitions = 10;
  cfg.seed_base = 7;
  cfg.generations = 30;
  cfg.population = 10;
  return cfg;
}

TEST(InstanceJson, RoundTripIsByteIdentical) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    GenParams gp;
    gp.vertex_count = 150;
    gp.rng_seed = s;
    const auto text = serialize_instance(generate_instance(gp));
    EXPECT_EQ(serialize_instance(parse_instance(text)), text);
  }
  const auto hand = testing::random_instance(9, 3, 4);
  const auto text = serialize_instance(hand);
  const auto back = parse_instance(text);
  EXPECT_EQ(serialize_instance(back), text);
  EXPECT_EQ(back.app.edge_count(), hand.app.edge_count());
  for (std::size_t i = 0; i < hand.app.edge_count(); ++i) EXPECT_EQ(back.app.edges()[i].weight, hand.app.edges()[i].weight);
}

TEST(InstanceJson, RejectsMalformedDocuments) {
  const std::string good = serialize_instance(testing::two_vertex_instance());
  EXPECT_NO_THROW(parse_instance(good));
  EXPECT_THROW(parse_instance("{"), FormatError);
  EXPECT_THROW(parse_instance("{}"), FormatError);
  EXPECT_THROW(parse_instance(R"({"name":"x","application":{"demands":[1,1],"edges":[[0,1]]},)"
                              R"("machines":{"capacities":[5],"link_cost":[[0]]}})"),
               FormatError);
  EXPECT_THROW(parse_instance(R"({"name":"x","application":{"demands":[1,1],"edges":[[0,5,1.0]]},)"
                              R"("machines":{"capacities":[5],"link_cost":[[0]]}})"),
               FormatError);
  EXPECT_THROW(parse_instance(R"({"name":"x","application":{"demands":[1,1],"edges":[[0,1,1.0]]},)"
                              R"("machines":{"capacities":[5,5],"link_cost":[[0,1],[2,0]]}})"),
               FormatError);
  EXPECT_THROW(parse_instance(R"({"name":"x","application":{"demands":[1,1],"edges":[[0.5,1,1.0]]},)"
                              R"("machines":{"capacities":[5],"link_cost":[[0]]}})"),
               FormatError);
}

TEST(InstanceJson, FileRoundTrip) {
  const auto dir = fresh_dir("io");
  const auto inst = testing::path_instance();
  write_instance_file(dir / "sub" / "p.json", inst);
  EXPECT_EQ(serialize_instance(read_instance_file(dir / "sub" / "p.json")), serialize_instance(inst));
  EXPECT_THROW(read_instance_file(dir / "absent.json"), std::runtime_error);
}

TEST(RunExperiment, MatrixShapeAndAggregation) {
  const auto instances = small_instances();
  const auto cfg = quick_config();
  const auto reports = run_experiment(instances, cfg);
  ASSERT_EQ(reports.size(), 60u);
  const auto rows = aggregate(reports, instance_shapes(instances));
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    double lo = 1e300, sum = 0.0;
    int n = 0;
    std::set<std::uint64_t> seeds;
    for (const auto& r : reports) {
      if (r.algorithm != row.algorithm || r.instance != row.instance) continue;
      EXPECT_TRUE(r.feasible);
      EXPECT_TRUE(testing::naive_feasible(instances[0].name == r.instance   ? instances[0]
                                          : instances[1].name == r.instance ? instances[1]
                                                                            : instances[2],
                                          r.best_genes));
      lo = std::min(lo, r.best_cost);
      sum += r.best_cost;
      ++n;
      seeds.insert(r.seed);
    }
    EXPECT_EQ(n, 10);
    EXPECT_EQ(seeds, (std::set<std::uint64_t>{7, 8, 9, 10, 11, 12, 13, 14, 15, 16}));
    EXPECT_EQ(row.runs, 10u);
    EXPECT_DOUBLE_EQ(*row.best_cost, lo);
    EXPECT_NEAR(*row.avg_cost, sum / 10.0, 1e-9 * sum);
  }
}

TEST(RunExperiment, SortedAndIndependentOfWorkerCount) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.repetitions = 3;
  const auto one = run_experiment(instances, cfg);
  cfg.workers = 4;
  const auto four = run_experiment(instances, cfg);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].algorithm, four[i].algorithm);
    EXPECT_EQ(one[i].instance, four[i].instance);
    EXPECT_EQ(one[i].seed, four[i].seed);
    EXPECT_EQ(one[i].best_genes, four[i].best_genes);
    EXPECT_EQ(one[i].trace, four[i].trace);
    if (i > 0) {
      EXPECT_LE(std::tie(one[i - 1].algorithm, one[i - 1].instance, one[i - 1].seed),
                std::tie(one[i].algorithm, one[i].instance, one[i].seed));
    }
  }
}

TEST(RunExperiment, AddingRepetitionsKeepsEarlierRuns) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.algorithms = {"fgpga"};
  cfg.repetitions = 2;
  const auto two = run_experiment(instances, cfg);
  cfg.repetitions = 4;
  const auto four = run_experiment(instances, cfg);
  for (const auto& r : two) {
    bool found = false;
    for (const auto& q : four) {
      if (q.instance == r.instance && q.seed == r.seed) {
        found = true;
        EXPECT_EQ(q.best_genes, r.best_genes);
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(WriteExperiment, OutputsAreByteIdenticalAcrossReruns) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.repetitions = 2;
  const auto shapes = instance_shapes(instances);
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  write_experiment(a, run_experiment(instances, cfg), shapes, false);
  write_experiment(b, run_experiment(instances, cfg), shapes, false);
  for (const char* f : {"runs.csv", "summary.csv"}) EXPECT_EQ(read_text_file(a / f), read_text_file(b / f)) << f;
  std::size_t traces = 0;
  for (const auto& entry : fs::directory_iterator(a / "traces")) {
    ++traces;
    EXPECT_EQ(read_text_file(entry.path()), read_text_file(b / "traces" / entry.path().filename()));
  }
  EXPECT_EQ(traces, 12u);
}

TEST(WriteExperiment, CsvLayout) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.repetitions = 2;
  const auto reports = run_experiment(instances, cfg);
  const auto shapes = instance_shapes(instances);
  const auto runs = runs_csv(reports, shapes, false);
  EXPECT_EQ(runs.substr(0, runs.find('\n') + 1), kCsvHeader);
  EXPECT_EQ(std::count(runs.begin(), runs.end(), '\n'), 13);
  const auto summary = summary_csv(aggregate(reports, shapes), false);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 7);
  EXPECT_NE(summary.find("fgpga," + instances[0].name + ",20,"), std::string::npos);
  EXPECT_NE(summary.find(",all,"), std::string::npos);
  EXPECT_EQ(summary.find("init_failed"), std::string::npos);
}

TEST(WriteExperiment, InitFailureIsAFlaggedRow) {
  std::vector<Instance> instances{
      testing::make_instance({6, 6}, {{0, 1, 1.0}}, {7, 7}, {{0, 1}, {1, 0}}, "ok"),
      testing::make_instance({6, 6, 6}, {{0, 1, 1.0}, {1, 2, 1.0}}, {7, 7}, {{0, 1}, {1, 0}}, "overfull")};
  auto cfg = quick_config();
  cfg.repetitions = 2;
  const auto reports = run_experiment(instances, cfg);
  ASSERT_EQ(reports.size(), 8u);
  const auto shapes = instance_shapes(instances);
  const auto runs = runs_csv(reports, shapes, false);
  EXPECT_NE(runs.find("fgpga,overfull,3,2,7,,,,false,init_failed"), std::string::npos) << runs;
  EXPECT_NE(runs.find("sa,overfull,3,2,8,,,,false,init_failed"), std::string::npos) << runs;
  const auto summary = summary_csv(aggregate(reports, shapes), false);
  EXPECT_NE(summary.find("fgpga,overfull,3,2,all,,,,false,init_failed"), std::string::npos) << summary;
  EXPECT_NE(summary.find("fgpga,ok,2,2,all,1,1,,true,ok"), std::string::npos) << summary;
  const auto dir = fresh_dir("initfail");
  write_experiment(dir, reports, shapes, false);
  EXPECT_NO_THROW(export_traces(dir, false));
}

TEST(VerifyReport, CatchesBadClaims) {
  const auto inst = testing::path_instance({2, 2, 2});
  RunReport r;
  r.status = RunStatus::ok;
  r.best_genes = {0, 0, 1, 1};
  r.best_cost = 4.0;
  verify_report(inst, r);
  EXPECT_TRUE(r.feasible);
  r.best_cost = 3.0;
  verify_report(inst, r);
  EXPECT_FALSE(r.feasible);
  r.best_genes = {0, 0, 0, 1};
  r.best_cost = cut_cost(inst, r.best_genes);
  verify_report(inst, r);
  EXPECT_FALSE(r.feasible);
}

TEST(ExportTraces, SeriesShapeAndMonotonicity) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.repetitions = 3;
  const auto dir = fresh_dir("export");
  write_experiment(dir, run_experiment(instances, cfg), instance_shapes(instances), false);
  const auto ex = export_traces(dir, false);
  std::map<std::string, std::vector<SeriesPoint>> by_series;
  for (const auto& p : ex.best_cost) by_series[p.series].push_back(p);
  EXPECT_EQ(by_series.size(), 18u);
  for (const auto& [label, pts] : by_series) {
    if (label.rfind("fgpga/", 0) == 0) {
      EXPECT_EQ(pts.size(), 30u) << label;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(pts[i].x, i + 1);
      if (i > 0) {
        EXPECT_LE(pts[i].y, pts[i - 1].y) << label;
      }
    }
  }
  ASSERT_EQ(ex.log_cost.size(), ex.best_cost.size());
  for (std::size_t i = 0; i < ex.log_cost.size(); ++i) {
    EXPECT_NEAR(ex.log_cost[i].y, std::log10(1.0 + ex.best_cost[i].y), 1e-12);
  }
  const auto csv = series_csv(ex.best_cost);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,series");
}

TEST(ExportTraces, AblationMedianHasTwoSeriesPerInstance) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.algorithms = {"fgpga", "fgpga-no-greedy"};
  cfg.repetitions = 3;
  const auto dir = fresh_dir("ablation");
  write_experiment(dir, run_experiment(instances, cfg), instance_shapes(instances), false);
  const auto ex = export_traces(dir, true);
  std::map<std::string, std::set<std::string>> per_instance;
  std::map<std::string, std::size_t> lengths;
  for (const auto& p : ex.log_cost) {
    const auto slash = p.series.find('/');
    per_instance[p.series.substr(slash + 1)].insert(p.series.substr(0, slash));
    ++lengths[p.series];
  }
  ASSERT_EQ(per_instance.size(), 3u);
  for (const auto& [inst, algos] : per_instance) {
    EXPECT_EQ(algos, (std::set<std::string>{"fgpga", "fgpga-no-greedy"})) << inst;
  }
  for (const auto& [label, n] : lengths) EXPECT_EQ(n, 30u) << label;
}

TEST(ExportTraces, MissingTraceNamesTheRun) {
  const auto instances = small_instances();
  auto cfg = quick_config();
  cfg.algorithms = {"fgpga"};
  cfg.repetitions = 1;
  const auto dir = fresh_dir("missing");
  write_experiment(dir, run_experiment(instances, cfg), instance_shapes(instances), false);
  fs::remove(dir / "traces" / trace_file_name("fgpga", instances[1].name, 7));
  try {
    export_traces(dir, false);
    FAIL() << "expected MissingTraceError";
  } catch (const MissingTraceError& e) {
    EXPECT_NE(std::string(e.what()).find("fgpga/" + instances[1].name + "/7"), std::string::npos) << e.what();
  }
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.repetitions = 0;
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = ExperimentConfig{};
  cfg.algorithms = {"fgpga", "tabu"};
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = ExperimentConfig{};
  cfg.generations = 0;
  EXPECT_THROW(cfg.validate(), ContractError);
}

TEST(ExperimentConfig, SeedSplitting) {
  EXPECT_EQ(run_seed(100, 0), 100u);
  EXPECT_EQ(run_seed(100, 9), 109u);
}

}  // namespace
}  // namespace fgp
