// Copyright 2026 The subfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "subfed/errors.h"
#include "subfed/louvain.h"
#include "support.h"

using namespace subfed;
using subfed::testing::random_graph;

namespace {

Graph cliques(int count, int size, bool ring) {
  std::vector<Edge> edges;
  for (int c = 0; c < count; ++c) {
    for (int a = 0; a < size; ++a)
      for (int b = a + 1; b < size; ++b) edges.emplace_back(c * size + a, c * size + b);
    if (ring) edges.emplace_back(c * size, ((c + 1) % count) * size + 1);
  }
  const std::size_t n = static_cast<std::size_t>(count * size);
  return build_graph(n, edges, Matrix(n, 1), std::vector<int>(n, 0), 1);
}

// Q = sum_c [ L_c / m - (d_c / 2m)^2 ]
double brute_modularity(const Graph& g, const std::vector<int>& comm) {
  const double m = static_cast<double>(g.edge_count());
  std::map<int, double> internal, degree;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    degree[comm[v]] += static_cast<double>(g.degree(static_cast<NodeId>(v)));
    for (NodeId u : g.neighbors(static_cast<NodeId>(v)))
      if (static_cast<NodeId>(v) < u && comm[v] == comm[u]) internal[comm[v]] += 1;
  }
  double q = 0;
  for (auto& [c, d] : degree) q += internal[c] / m - (d / (2 * m)) * (d / (2 * m));
  return q;
}

void check_exact(const Graph& g, const Partition& p) {
  std::size_t nodes = 0, edges = 0;
  std::set<NodeId> seen;
  for (const auto& s : p.subgraphs) {
    nodes += s.graph.node_count();
    edges += s.graph.edge_count();
    for (NodeId v : s.global_ids) CHECK(seen.insert(v).second);
  }
  CHECK(nodes == g.node_count());
  CHECK(edges + p.dropped_edges == g.edge_count());
  CHECK(p.dropped_fraction ==
        doctest::Approx(static_cast<double>(p.dropped_edges) /
                        static_cast<double>(g.edge_count())));
}

}  // namespace

TEST_CASE("two disjoint cliques split cleanly") {
  const Graph g = cliques(2, 5, false);
  const Partition p = louvain_partition(g, 2, 1);
  CHECK(p.dropped_edges == 0);
  REQUIRE(p.subgraphs.size() == 2);
  for (const auto& s : p.subgraphs) {
    CHECK(s.graph.node_count() == 5);
    CHECK(s.global_ids.back() - s.global_ids.front() == 4);
  }
  check_exact(g, p);
}

TEST_CASE("single client keeps everything") {
  Rng rng(2);
  const Graph g = random_graph(50, 0.1, 1, 1, rng);
  const Partition p = louvain_partition(g, 1, 3);
  CHECK(p.dropped_edges == 0);
  CHECK(p.subgraphs[0].graph.node_count() == 50);
  check_exact(g, p);
}

TEST_CASE("too many clients is an argument error") {
  const Graph g = cliques(1, 3, false);
  CHECK_THROWS_AS(louvain_partition(g, 4, 1), ArgumentError);
  CHECK_THROWS_AS(louvain_partition(g, 0, 1), ArgumentError);
}

TEST_CASE("ring of cliques: communities are the cliques") {
  const Graph g = cliques(6, 6, true);
  const auto comm = louvain_communities(g, 7);
  for (int c = 0; c < 6; ++c)
    for (int a = 1; a < 6; ++a) CHECK(comm[c * 6 + a] == comm[c * 6]);
  std::set<int> distinct(comm.begin(), comm.end());
  CHECK(distinct.size() == 6);
}

TEST_CASE("modularity matches the textbook formula and louvain beats trivial partitions") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_graph(60, 0.08, 1, 1, rng);
    const auto comm = louvain_communities(g, static_cast<std::uint64_t>(trial));
    CHECK(modularity(g, comm) == doctest::Approx(brute_modularity(g, comm)).epsilon(1e-12));
    std::vector<int> singletons(60), together(60, 0);
    for (int i = 0; i < 60; ++i) singletons[i] = i;
    CHECK(modularity(g, comm) >= modularity(g, singletons));
    CHECK(modularity(g, comm) >= modularity(g, together));
    for (int m : {2, 3, 5}) check_exact(g, louvain_partition(g, m, trial));
  }
}

TEST_CASE("merge rule: largest community first into the smallest group") {
  // communities of sizes 5, 4, 3, 2, 1 on an edgeless graph
  const std::size_t n = 15;
  const Graph g = build_graph(n, {}, Matrix(n, 1), std::vector<int>(n, 0), 1);
  std::vector<int> comm;
  for (int c = 0, size = 5; size >= 1; ++c, --size)
    for (int k = 0; k < size; ++k) comm.push_back(c);
  const Partition p = partition_from_communities(g, comm, 2);
  // 5 -> A, 4 -> B, 3 -> B (7), 2 -> A (7), 1 -> A (tie, first group)
  CHECK(p.subgraphs[0].graph.node_count() == 8);
  CHECK(p.subgraphs[1].graph.node_count() == 7);
  CHECK(p.owner[0] == 0);
  CHECK(p.owner[5] == 1);
  CHECK(p.owner[9] == 1);
  CHECK(p.owner[12] == 0);
  CHECK(p.owner[14] == 0);
}

TEST_CASE("fewer communities than clients still yields non-empty clients") {
  const Graph g = cliques(1, 8, false);
  const Partition p = louvain_partition(g, 3, 1);
  for (const auto& s : p.subgraphs) CHECK(s.graph.node_count() >= 2);
  check_exact(g, p);
}

TEST_CASE("partition is reproducible per seed") {
  Rng rng(9);
  const Graph g = random_graph(80, 0.06, 1, 1, rng);
  const Partition a = louvain_partition(g, 3, 42), b = louvain_partition(g, 3, 42);
  CHECK(a.owner == b.owner);
}
