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
#include "subfed/graph.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "subfed/errors.h"

namespace subfed {

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nbrs : adjacency) total += nbrs.size();
  return total / 2;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto& nbrs = adjacency[u];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

void Graph::validate() const {
  const std::size_t n = node_count();
  if (features.rows() != n) {
    throw SchemaError("feature rows " + std::to_string(features.rows()) +
                      " != node count " + std::to_string(n));
  }
  if (labels.size() != n) {
    throw SchemaError("label count " + std::to_string(labels.size()) +
                      " != node count " + std::to_string(n));
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (labels[v] < 0 || labels[v] >= num_classes) {
      throw SchemaError("node " + std::to_string(v) + " has label " +
                        std::to_string(labels[v]) + " outside [0, " +
                        std::to_string(num_classes) + ")");
    }
    const auto& nbrs = adjacency[v];
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const NodeId u = nbrs[k];
      if (u < 0 || static_cast<std::size_t>(u) >= n)
        throw SchemaError("neighbour id out of range at node " +
                          std::to_string(v));
      if (u == static_cast<NodeId>(v))
        throw SchemaError("self-loop at node " + std::to_string(v));
      if (k > 0 && nbrs[k - 1] >= u)
        throw SchemaError("unsorted or duplicate neighbours at node " +
                          std::to_string(v));
      if (!has_edge(u, static_cast<NodeId>(v)))
        throw SchemaError("asymmetric edge " + std::to_string(v) + "-" +
                          std::to_string(u));
    }
  }
}

Graph build_graph(std::size_t node_count, std::span<const Edge> edges,
                  Matrix features, std::vector<int> labels, int num_classes,
                  LoadReport* report) {
  Graph g;
  g.adjacency.assign(node_count, {});
  LoadReport local;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= node_count ||
        static_cast<std::size_t>(v) >= node_count) {
      throw SchemaError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                        " references a missing node");
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  std::size_t directed_before = 0;
  for (auto& nbrs : g.adjacency) {
    directed_before += nbrs.size();
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  std::size_t directed_after = 0;
  for (const auto& nbrs : g.adjacency) directed_after += nbrs.size();
  local.duplicate_edges_dropped = (directed_before - directed_after) / 2;
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.num_classes = num_classes;
  g.validate();
  if (report) *report = local;
  return g;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, int line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                   value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "bad number '" + std::string(token) + "'");
  }
  return value;
}

std::size_t parse_header_field(std::string_view token, std::string_view key,
                               int line_no) {
  if (token.substr(0, key.size()) != key || token.size() <= key.size() ||
      token[key.size()] != '=') {
    throw ParseError(line_no, "expected '" + std::string(key) + "=<n>'");
  }
  return parse_number<std::size_t>(token.substr(key.size() + 1), line_no);
}

}  // namespace

Graph parse_graph(std::istream& in, LoadReport* report) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::size_t n = 0, dim = 0, classes = 0;
  Matrix features;
  std::vector<int> labels;
  std::vector<bool> seen;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (!have_header) {
      if (tokens.size() != 3) throw ParseError(line_no, "malformed header");
      n = parse_header_field(tokens[0], "nodes", line_no);
      dim = parse_header_field(tokens[1], "features", line_no);
      classes = parse_header_field(tokens[2], "classes", line_no);
      features = Matrix(n, dim);
      labels.assign(n, -1);
      seen.assign(n, false);
      have_header = true;
      continue;
    }
    if (tokens[0] == "node") {
      if (tokens.size() < 3) throw ParseError(line_no, "malformed node line");
      const auto id = parse_number<long long>(tokens[1], line_no);
      if (id < 0 || static_cast<std::size_t>(id) >= n)
        throw ParseError(line_no, "node id " + std::to_string(id) +
                                      " out of range");
      if (seen[id]) throw ParseError(line_no, "duplicate node " + std::to_string(id));
      seen[id] = true;
      const int label = parse_number<int>(tokens[2], line_no);
      if (label < 0 || static_cast<std::size_t>(label) >= classes)
        throw SchemaError("line " + std::to_string(line_no) + ": label " +
                          std::to_string(label) + " outside [0, " +
                          std::to_string(classes) + ")");
      if (tokens.size() - 3 != dim)
        throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(dim) + " features, got " +
                          std::to_string(tokens.size() - 3));
      labels[id] = label;
      auto row = features.row(id);
      for (std::size_t k = 0; k < dim; ++k)
        row[k] = parse_number<double>(tokens[3 + k], line_no);
    } else if (tokens[0] == "edge") {
      if (tokens.size() != 3) throw ParseError(line_no, "malformed edge line");
      edges.emplace_back(parse_number<int>(tokens[1], line_no),
                         parse_number<int>(tokens[2], line_no));
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(tokens[0]) + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  for (std::size_t v = 0; v < n; ++v)
    if (!seen[v]) throw SchemaError("node " + std::to_string(v) + " not listed");
  return build_graph(n, edges, std::move(features), std::move(labels),
                     static_cast<int>(classes), report);
}

Graph load_graph(const std::filesystem::path& path, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_graph(in, report);
}

void write_graph(const Graph& g, std::ostream& out,
                 const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "nodes=" << g.node_count() << " features=" << g.feature_dim()
      << " classes=" << g.num_classes << '\n';
  char buf[32];
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    out << "node " << v << ' ' << g.labels[v];
    for (double x : g.feature(static_cast<NodeId>(v))) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, end - buf);
    }
    out << '\n';
  }
  for (std::size_t v = 0; v < g.node_count(); ++v)
    for (NodeId u : g.adjacency[v])
      if (static_cast<NodeId>(v) < u) out << "edge " << v << ' ' << u << '\n';
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes,
                          int owner) {
  Subgraph sub;
  sub.owner = owner;
  sub.global_ids.assign(nodes.begin(), nodes.end());
  std::vector<NodeId> local(g.node_count(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (local[nodes[i]] != -1)
      throw ArgumentError("node listed twice in subgraph");
    local[nodes[i]] = static_cast<NodeId>(i);
  }
  Graph& h = sub.graph;
  h.adjacency.assign(nodes.size(), {});
  h.features = Matrix(nodes.size(), g.feature_dim());
  h.labels.resize(nodes.size());
  h.num_classes = g.num_classes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    auto src = g.feature(v);
    std::copy(src.begin(), src.end(), h.features.row(i).begin());
    h.labels[i] = g.labels[v];
    for (NodeId u : g.neighbors(v))
      if (local[u] != -1) h.adjacency[i].push_back(local[u]);
    std::sort(h.adjacency[i].begin(), h.adjacency[i].end());
  }
  return sub;
}

ImpairedView impair(const Subgraph& sub, double hidden_fraction,
                    std::uint64_t seed) {
  if (!(hidden_fraction >= 0.0 && hidden_fraction < 1.0))
    throw ArgumentError("impair ratio must be in [0, 1)");
  const std::size_t n = sub.graph.node_count();
  const auto hide = static_cast<std::size_t>(
      std::floor(hidden_fraction * static_cast<double>(n)));

  ImpairedView view;
  view.base = sub;
  view.hidden.assign(n, false);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // partial Fisher-Yates: the first `hide` slots are a uniform sample
  for (std::size_t i = 0; i < hide; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  for (std::size_t i = 0; i < hide; ++i) view.hidden[order[i]] = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (view.hidden[v]) view.hidden_nodes.push_back(static_cast<NodeId>(v));
    else view.retained.push_back(static_cast<NodeId>(v));
  }

  view.graph = sub.graph;
  view.missing_count.assign(n, 0);
  view.hidden_neighbors.assign(n, {});
  view.missing_embeddings.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    auto& nbrs = view.graph.adjacency[v];
    if (view.hidden[v]) {
      nbrs.clear();
      continue;
    }
    std::vector<NodeId> kept;
    for (NodeId u : nbrs) {
      if (view.hidden[u]) view.hidden_neighbors[v].push_back(u);
      else kept.push_back(u);
    }
    nbrs = std::move(kept);
    view.missing_count[v] = static_cast<int>(view.hidden_neighbors[v].size());
  }
  return view;
}

NodeSplit split_nodes(const ImpairedView& view, std::uint64_t seed) {
  const std::size_t n = view.retained.size();
  if (n < 5)
    throw ArgumentError("split needs at least 5 retained nodes, have " +
                        std::to_string(n));
  std::vector<NodeId> order = view.retained;
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(0.6 * n + 0.5);
  const auto n_val = static_cast<std::size_t>(0.2 * n + 0.5);
  NodeSplit split;
  split.roles.assign(view.graph.node_count(), Role::kUnused);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = order[i];
    if (i < n_train) {
      split.train.push_back(v);
      split.roles[v] = Role::kTrain;
    } else if (i < n_train + n_val) {
      split.val.push_back(v);
      split.roles[v] = Role::kVal;
    } else {
      split.test.push_back(v);
      split.roles[v] = Role::kTest;
    }
  }
  return split;
}

namespace {

// Breadth-first search to depth `hops`; returns visited nodes in BFS order.
std::vector<NodeId> bfs(const Graph& g, std::span<const NodeId> sources,
                        int hops) {
  std::vector<int> dist(g.node_count(), -1);
  std::deque<NodeId> queue;
  std::vector<NodeId> visited;
  for (NodeId s : sources) {
    if (dist[s] != -1) continue;
    dist[s] = 0;
    queue.push_back(s);
    visited.push_back(s);
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (dist[v] == hops) continue;
    for (NodeId u : g.neighbors(v)) {
      if (dist[u] != -1) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
      visited.push_back(u);
    }
  }
  return visited;
}

}  // namespace

EgoGraph ego_graph(const Graph& g, NodeId v, int hops) {
  if (v < 0 || static_cast<std::size_t>(v) >= g.node_count())
    throw ArgumentError("node " + std::to_string(v) + " not in graph");
  if (hops < 0) throw ArgumentError("hop count must be non-negative");
  const NodeId centre[] = {v};
  EgoGraph ego;
  ego.nodes = bfs(g, centre, hops);
  std::sort(ego.nodes.begin(), ego.nodes.end());
  for (NodeId a : ego.nodes)
    for (NodeId b : g.neighbors(a))
      if (a < b && std::binary_search(ego.nodes.begin(), ego.nodes.end(), b))
        ego.edges.emplace_back(a, b);
  return ego;
}

EgoGraph ego_graph(const ImpairedView& view, NodeId v, int hops) {
  if (!view.is_retained(v))
    throw ArgumentError("node " + std::to_string(v) +
                        " is hidden or absent from the view");
  return ego_graph(view.graph, v, hops);
}

DegreeScan min_retained_degree(const ImpairedView& view, int hops) {
  if (hops < 1) throw ArgumentError("hops must be >= 1");
  if (view.retained.empty()) throw ArgumentError("view has no retained nodes");
  DegreeScan scan;
  scan.degree = static_cast<std::size_t>(-1);
  for (NodeId u : bfs(view.graph, view.retained, hops - 1)) {
    const std::size_t deg = view.graph.degree(u);
    if (deg < scan.degree || (deg == scan.degree && u < scan.node)) {
      scan.degree = deg;
      scan.node = u;
    }
  }
  return scan;
}

}  // namespace subfed
