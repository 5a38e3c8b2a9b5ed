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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

#include "fgp/instance_gen.hpp"
#include "fgp/instance_io.hpp"

namespace fgp {
namespace {

Instance generated(std::size_t v, std::uint64_t seed) {
  GenParams gp;
  gp.vertex_count = v;
  gp.rng_seed = seed;
  return generate_instance(gp);
}

bool connected(const ApplicationGraph& g) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (const auto& inc : g.neighbors(v)) {
      if (!seen[inc.other]) {
        seen[inc.other] = true;
        ++reached;
        q.push(inc.other);
      }
    }
  }
  return reached == g.vertex_count();
}

// First-fit decreasing: largest demand first, lowest-index machine with room.
bool ffd_packs(const Instance& inst) {
  std::vector<VertexId> order(inst.app.vertex_count());
  std::iota(order.begin(), order.end(), VertexId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return inst.app.demand(a) > inst.app.demand(b); });
  std::vector<double> room(inst.machines.capacities().begin(), inst.machines.capacities().end());
  for (VertexId v : order) {
    auto it = std::find_if(room.begin(), room.end(), [&](double r) { return r >= inst.app.demand(v); });
    if (it == room.end()) return false;
    *it -= inst.app.demand(v);
  }
  return true;
}

TEST(GenerateApplicationGraph, DemandMeanMatchesRate) {
  GenParams gp;
  gp.vertex_count = 10000;
  gp.rng_seed = 5;
  Rng rng(gp.rng_seed);
  const auto g = generate_application_graph(gp, rng);
  const auto& r = g.demands();
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  EXPECT_NEAR(mean, 10.0, 0.5);
  for (double x : r) EXPECT_GE(x, 0.0);
}

TEST(GenerateApplicationGraph, EdgeWeightMeanMatchesRate) {
  GenParams gp;
  gp.vertex_count = 10000;
  gp.rng_seed = 6;
  Rng rng(gp.rng_seed);
  const auto g = generate_application_graph(gp, rng);
  ASSERT_GE(g.edge_count(), 10000u);
  double sum = 0.0;
  for (const auto& e : g.edges()) sum += e.weight;
  EXPECT_NEAR(sum / static_cast<double>(g.edge_count()), 200.0, 10.0);
}

TEST(GenerateApplicationGraph, SparseAndConnected) {
  for (std::size_t v : {2u, 3u, 4u, 10u, 100u, 1000u, 5000u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      GenParams gp;
      gp.vertex_count = v;
      gp.rng_seed = seed;
      Rng rng(seed);
      const auto g = generate_application_graph(gp, rng);
      EXPECT_EQ(g.vertex_count(), v);
      EXPECT_LE(static_cast<double>(g.edge_count()), gp.target_edge_factor * static_cast<double>(v) * 1.1) << v;
      EXPECT_GE(g.edge_count(), v - 1);
      EXPECT_TRUE(connected(g)) << v << " " << seed;
    }
  }
}

TEST(GenerateApplicationGraph, EdgeCountNearTarget) {
  const auto inst = generated(1000, 3);
  EXPECT_GE(inst.app.edge_count(), 1900u);
  EXPECT_LE(inst.app.edge_count(), 2000u);
}

TEST(GenerateApplicationGraph, DegreeHistogramIsRoughlyPowerLaw) {
  for (std::size_t v : {1000u, 5000u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto inst = generated(v, seed);
      std::map<std::size_t, std::size_t> hist;
      for (VertexId i = 0; i < inst.app.vertex_count(); ++i) ++hist[inst.app.degree(i)];
      std::vector<double> xs, ys;
      for (auto [d, c] : hist) {
        xs.push_back(std::log(static_cast<double>(d)));
        ys.push_back(std::log(static_cast<double>(c)));
      }
      const double n = static_cast<double>(xs.size());
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
      double sxx = 0, sxy = 0, syy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
      }
      const double slope = sxy / sxx;
      const double r2 = sxy * sxy / (sxx * syy);
      EXPECT_LT(slope, 0.0) << v << " " << seed;
      EXPECT_GE(r2, 0.8) << v << " " << seed << " slope " << slope;
    }
  }
}

TEST(GenerateMachineGraph, CapacityHeadroomAndChoices) {
  const std::set<double> choices{100, 200, 300, 400, 500, 600, 700, 800};
  for (std::size_t v = 100; v <= 1000; v += 100) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = generated(v, seed);
      EXPECT_GE(inst.machines.total_capacity(), 1.5 * inst.app.total_demand());
      EXPECT_GE(inst.machines.max_capacity(), inst.app.max_demand());
      for (double c : inst.machines.capacities()) EXPECT_TRUE(choices.count(c)) << c;
    }
  }
}

TEST(GenerateMachineGraph, TriangleInequality) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = generated(600, seed);
    const std::size_t m = inst.machines.machine_count();
    ASSERT_GE(m, 3u);
    for (MachineId i = 0; i < m; ++i) {
      for (MachineId j = 0; j < m; ++j) {
        if (i != j) {
          EXPECT_GT(inst.machines.link_cost(i, j), 0.0);
        }
        for (MachineId k = 0; k < m; ++k) {
          EXPECT_LE(inst.machines.link_cost(i, k),
                    inst.machines.link_cost(i, j) + inst.machines.link_cost(j, k) + 1e-9);
        }
      }
    }
  }
}

TEST(GenerateMachineGraph, AddsMachineForOversizedComponent) {
  const auto app = ApplicationGraph({90, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}});
  GenParams gp;
  gp.capacity_choices = {50, 100};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto mg = generate_machine_graph(app, gp, rng);
    EXPECT_GE(mg.max_capacity(), 90.0);
    EXPECT_GE(mg.total_capacity(), 1.5 * 92.0);
  }
}

TEST(GenerateInstance, FirstFitDecreasingFindsFeasibleAssignment) {
  for (std::size_t v = 100; v <= 1000; v += 100) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_TRUE(ffd_packs(generated(v, seed))) << v << " " << seed;
  }
}

TEST(GenerateInstance, DeterministicUnderSeed) {
  const auto a = serialize_instance(generated(300, 17));
  const auto b = serialize_instance(generated(300, 17));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, serialize_instance(generated(300, 18)));
}

TEST(GenerateInstance, LadderNamesAndSizes) {
  for (std::size_t v = 100; v <= 1000; v += 100) {
    const auto inst = generated(v, 42);
    EXPECT_EQ(inst.name, "pl-v" + std::to_string(v) + "-s42");
    EXPECT_EQ(inst.app.vertex_count(), v);
    EXPECT_GE(inst.machines.machine_count(), 2u);
  }
}

TEST(GenParams, RejectsBadValues) {
  GenParams gp;
  gp.vertex_count = 1;
  EXPECT_THROW(gp.validate(), ContractError);
  gp = GenParams{};
  gp.capacity_headroom = 1.0;
  EXPECT_THROW(gp.validate(), ContractError);
  gp = GenParams{};
  gp.capacity_choices.clear();
  EXPECT_THROW(gp.validate(), ContractError);
  gp = GenParams{};
  gp.edge_weight_lambda = 0.0;
  EXPECT_THROW(gp.validate(), ContractError);
}

}  // namespace
}  // namespace fgp
