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
#ifndef SUBFED_GRAPH_H_
#define SUBFED_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subfed/matrix.h"

namespace subfed {

using NodeId = int;
using Adjacency = std::vector<std::vector<NodeId>>;
using Edge = std::pair<NodeId, NodeId>;

// Node-labelled undirected graph. Neighbour lists are sorted, symmetric and
// free of self-loops and duplicates.
struct Graph {
  Adjacency adjacency;
  Matrix features;  // node_count x feature_dim
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t node_count() const { return adjacency.size(); }
  std::size_t edge_count() const;
  std::size_t feature_dim() const { return features.cols(); }
  std::size_t degree(NodeId v) const { return adjacency[v].size(); }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency[v]; }
  std::span<const double> feature(NodeId v) const { return features.row(v); }
  bool has_edge(NodeId u, NodeId v) const;

  // Throws SchemaError on any broken invariant.
  void validate() const;
};

using GlobalGraph = Graph;

struct LoadReport {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_dropped = 0;
};

// Builds a validated graph from an edge list; symmetrises, drops self-loops
// and duplicates.
Graph build_graph(std::size_t node_count, std::span<const Edge> edges,
                  Matrix features, std::vector<int> labels, int num_classes,
                  LoadReport* report = nullptr);

// Text format:
//   nodes=<N> features=<d_x> classes=<|Y|>
//   node <id> <label> <f_1> ... <f_dx>      (N lines)
//   edge <u> <v>
// Lines starting with '#' are comments.
Graph parse_graph(std::istream& in, LoadReport* report = nullptr);
Graph load_graph(const std::filesystem::path& path,
                 LoadReport* report = nullptr);
void write_graph(const Graph& g, std::ostream& out,
                 const std::vector<std::string>& comments = {});

// A client's share of the global graph. Local ids index `global_ids`.
struct Subgraph {
  int owner = 0;
  std::vector<NodeId> global_ids;
  Graph graph;
};

// Restricts `g` to `nodes` (global ids); edges leaving the set are dropped.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes,
                          int owner);

// A subgraph with a fraction of its nodes hidden. `graph` keeps the local id
// space of `base`; hidden nodes are present but isolated.
struct ImpairedView {
  Subgraph base;
  Graph graph;
  std::vector<bool> hidden;
  std::vector<NodeId> hidden_nodes;
  std::vector<NodeId> retained;
  // Per local node; zero and empty for hidden nodes.
  std::vector<int> missing_count;
  std::vector<std::vector<NodeId>> hidden_neighbors;
  // Ground-truth embeddings of each hidden neighbour, aligned with
  // hidden_neighbors. Empty until the local embedder has run.
  std::vector<std::vector<std::vector<double>>> missing_embeddings;
  bool embeddings_filled = false;

  bool is_retained(NodeId v) const {
    return v >= 0 && static_cast<std::size_t>(v) < hidden.size() && !hidden[v];
  }
};

// Hides floor(h * |V_i|) nodes drawn uniformly without replacement.
ImpairedView impair(const Subgraph& sub, double hidden_fraction,
                    std::uint64_t seed);

enum class Role { kUnused, kTrain, kVal, kTest };

struct NodeSplit {
  std::vector<Role> roles;  // per local node
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

// Seeded shuffle of the retained nodes, then a 60/20/20 cut.
NodeSplit split_nodes(const ImpairedView& view, std::uint64_t seed);

struct EgoGraph {
  std::vector<NodeId> nodes;  // sorted, includes the centre
  std::vector<Edge> edges;    // induced, u < v
};

EgoGraph ego_graph(const Graph& g, NodeId v, int hops);
// Same, over the retained part of an impaired view.
EgoGraph ego_graph(const ImpairedView& view, NodeId v, int hops);

struct DegreeScan {
  std::size_t degree = 0;
  NodeId node = -1;
};

// Minimum impaired-graph degree over every node within (hops - 1) hops of a
// retained node.
DegreeScan min_retained_degree(const ImpairedView& view, int hops);

}  // namespace subfed

#endif  // SUBFED_GRAPH_H_
