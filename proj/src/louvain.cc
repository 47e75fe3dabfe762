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
#include "subfed/louvain.h"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "subfed/errors.h"

namespace subfed {
namespace {

struct WeightedGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;  // excludes self-loops
  std::vector<double> self_loop;
  std::vector<double> degree;  // weighted degree, self-loops counted twice
  double total = 0.0;          // sum of degrees = 2m

  std::size_t size() const { return adj.size(); }
};

WeightedGraph from_graph(const Graph& g) {
  WeightedGraph w;
  const std::size_t n = g.node_count();
  w.adj.resize(n);
  w.self_loop.assign(n, 0.0);
  w.degree.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (NodeId u : g.neighbors(static_cast<NodeId>(v))) w.adj[v].emplace_back(u, 1.0);
    w.degree[v] = static_cast<double>(g.degree(static_cast<NodeId>(v)));
    w.total += w.degree[v];
  }
  return w;
}

// One round of local moving. Returns true if any node changed community.
bool local_moving(const WeightedGraph& g, std::vector<int>& comm, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) tot[comm[v]] += g.degree[v];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  bool moved_any = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int v : order) {
      const int own = comm[v];
      const double kv = g.degree[v];
      touched.clear();
      touched.push_back(own);
      link[own] = 0.0;
      for (auto [u, wt] : g.adj[v]) {
        const int c = comm[u];
        if (link[c] == 0.0 && c != own &&
            std::find(touched.begin(), touched.end(), c) == touched.end()) {
          touched.push_back(c);
        }
        link[c] += wt;
      }
      tot[own] -= kv;
      int best = own;
      double best_gain = link[own] - tot[own] * kv / g.total;
      for (int c : touched) {
        const double gain = link[c] - tot[c] * kv / g.total;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += kv;
      for (int c : touched) link[c] = 0.0;
      if (best != own) {
        comm[v] = best;
        improved = true;
        moved_any = true;
      }
    }
  }
  return moved_any;
}

int renumber(std::vector<int>& comm) {
  std::unordered_map<int, int> ids;
  for (int& c : comm) {
    auto [it, inserted] = ids.emplace(c, static_cast<int>(ids.size()));
    c = it->second;
  }
  return static_cast<int>(ids.size());
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& comm,
                        int count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  out.total = g.total;
  std::vector<std::unordered_map<int, double>> links(count);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const int cv = comm[v];
    out.degree[cv] += g.degree[v];
    out.self_loop[cv] += g.self_loop[v];
    for (auto [u, wt] : g.adj[v]) {
      const int cu = comm[u];
      if (cu == cv) out.self_loop[cv] += wt;  // each internal edge seen twice
      else links[cv][cu] += wt;
    }
  }
  for (int c = 0; c < count; ++c) {
    out.adj[c].assign(links[c].begin(), links[c].end());
    std::sort(out.adj[c].begin(), out.adj[c].end());
  }
  return out;
}

}  // namespace

std::vector<int> louvain_communities(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  std::vector<int> membership(n);
  std::iota(membership.begin(), membership.end(), 0);
  if (n == 0) return membership;
  WeightedGraph level = from_graph(g);
  if (level.total == 0.0) return membership;
  Rng rng(seed);
  while (true) {
    std::vector<int> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0);
    if (!local_moving(level, comm, rng)) break;
    const int count = renumber(comm);
    for (int& m : membership) m = comm[m];
    if (static_cast<std::size_t>(count) == level.size()) break;
    level = aggregate(level, comm, count);
  }
  renumber(membership);
  return membership;
}

double modularity(const Graph& g, std::span<const int> community) {
  const double two_m = 2.0 * static_cast<double>(g.edge_count());
  if (two_m == 0.0) return 0.0;
  std::unordered_map<int, double> internal, tot;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    tot[community[v]] += static_cast<double>(g.degree(static_cast<NodeId>(v)));
    for (NodeId u : g.neighbors(static_cast<NodeId>(v)))
      if (community[u] == community[v]) internal[community[v]] += 1.0;
  }
  double q = 0.0;
  for (auto [c, t] : tot) q += internal[c] / two_m - (t / two_m) * (t / two_m);
  return q;
}

Partition partition_from_communities(const Graph& g,
                                     std::span<const int> community,
                                     int clients) {
  const std::size_t n = g.node_count();
  if (clients < 1) throw ArgumentError("client count must be >= 1");
  if (static_cast<std::size_t>(clients) > n)
    throw ArgumentError("client count " + std::to_string(clients) +
                        " exceeds node count " + std::to_string(n));

  int count = 0;
  for (int c : community) count = std::max(count, c + 1);
  std::vector<std::vector<NodeId>> members(count);
  for (std::size_t v = 0; v < n; ++v)
    members[community[v]].push_back(static_cast<NodeId>(v));

  // Fewer communities than clients: split the largest one in BFS order so
  // every client receives a non-empty subgraph.
  while (members.size() < static_cast<std::size_t>(clients)) {
    auto largest = std::max_element(
        members.begin(), members.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    std::vector<NodeId> group = std::move(*largest);
    std::vector<bool> in_group(n, false), seen(n, false);
    for (NodeId v : group) in_group[v] = true;
    std::vector<NodeId> order;
    for (NodeId s : group) {
      if (seen[s]) continue;
      std::deque<NodeId> queue{s};
      seen[s] = true;
      while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (NodeId u : g.neighbors(v))
          if (in_group[u] && !seen[u]) {
            seen[u] = true;
            queue.push_back(u);
          }
      }
    }
    const std::size_t half = order.size() / 2;
    *largest = std::vector<NodeId>(order.begin(), order.begin() + half);
    members.emplace_back(order.begin() + half, order.end());
  }

  std::vector<std::size_t> by_size(members.size());
  std::iota(by_size.begin(), by_size.end(), 0);
  std::stable_sort(by_size.begin(), by_size.end(), [&](auto a, auto b) {
    return members[a].size() > members[b].size();
  });
  std::vector<std::vector<NodeId>> groups(clients);
  for (std::size_t idx : by_size) {
    auto smallest = std::min_element(
        groups.begin(), groups.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    smallest->insert(smallest->end(), members[idx].begin(), members[idx].end());
  }

  Partition part;
  part.owner.assign(n, -1);
  for (int i = 0; i < clients; ++i) {
    std::sort(groups[i].begin(), groups[i].end());
    for (NodeId v : groups[i]) part.owner[v] = i;
  }
  for (int i = 0; i < clients; ++i)
    part.subgraphs.push_back(induced_subgraph(g, groups[i], i));
  for (std::size_t v = 0; v < n; ++v)
    for (NodeId u : g.neighbors(static_cast<NodeId>(v)))
      if (static_cast<NodeId>(v) < u && part.owner[v] != part.owner[u])
        ++part.dropped_edges;
  const std::size_t m = g.edge_count();
  part.dropped_fraction =
      m == 0 ? 0.0 : static_cast<double>(part.dropped_edges) / static_cast<double>(m);
  return part;
}

Partition louvain_partition(const Graph& g, int clients, std::uint64_t seed) {
  if (clients < 1) throw ArgumentError("client count must be >= 1");
  if (static_cast<std::size_t>(clients) > g.node_count())
    throw ArgumentError("client count " + std::to_string(clients) +
                        " exceeds node count " + std::to_string(g.node_count()));
  const auto community = louvain_communities(g, seed);
  return partition_from_communities(g, community, clients);
}

}  // namespace subfed
