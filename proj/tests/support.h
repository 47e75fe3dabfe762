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
#ifndef SUBFED_TESTS_SUPPORT_H_
#define SUBFED_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "subfed/graph.h"
#include "subfed/matrix.h"
#include "subfed/nn.h"

namespace subfed::testing {

// |a - b| / max(|a|, |b|, floor). The floor keeps gradients that are
// numerically zero from dominating the ratio.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

// Central differences of `loss` against the gradients already accumulated in
// `params`. `stride` > 1 checks every stride-th entry of large tensors.
inline GradCheck check_gradients(ParamStore& params,
                                 const std::function<double()>& loss,
                                 std::size_t stride = 1, double h = 1e-5) {
  GradCheck out;
  for (auto& [name, p] : params) {
    auto values = p.value.values();
    auto grads = p.grad.values();
    for (std::size_t i = 0; i < values.size(); i += stride) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss();
      values[i] = saved - h;
      const double down = loss();
      values[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double err = relative_error(grads[i], numeric);
      ++out.checked;
      if (err > out.max_rel_error) {
        out.max_rel_error = err;
        out.worst = name + "[" + std::to_string(i) + "] analytic " +
                    std::to_string(grads[i]) + " numeric " + std::to_string(numeric);
      }
    }
  }
  return out;
}

// Same, for a free vector of inputs.
inline GradCheck check_vector_gradient(std::vector<double>& x,
                                       const std::vector<double>& analytic,
                                       const std::function<double()>& loss,
                                       double h = 1e-5) {
  GradCheck out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = loss();
    x[i] = saved - h;
    const double down = loss();
    x[i] = saved;
    const double err = relative_error(analytic[i], (up - down) / (2 * h));
    ++out.checked;
    if (err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst = "x[" + std::to_string(i) + "]";
    }
  }
  return out;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = u(rng);
  return m;
}

// Erdos-Renyi graph with dense random features and labels.
inline Graph random_graph(std::size_t n, double p, std::size_t dim, int classes,
                          Rng& rng, double feature_lo = -1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (u(rng) < p) edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  std::vector<int> labels(n);
  std::uniform_int_distribution<int> lab(0, classes - 1);
  for (auto& l : labels) l = lab(rng);
  return build_graph(n, edges, random_matrix(n, dim, rng, feature_lo, 1.0),
                     std::move(labels), classes);
}

// Plain BFS ball used as an independent oracle.
inline std::vector<NodeId> bfs_ball(const Graph& g, NodeId v, int hops) {
  std::vector<int> dist(g.node_count(), -1);
  std::vector<NodeId> frontier{v}, out{v};
  dist[v] = 0;
  for (int k = 0; k < hops; ++k) {
    std::vector<NodeId> next;
    for (NodeId x : frontier)
      for (NodeId y : g.neighbors(x))
        if (dist[y] < 0) {
          dist[y] = k + 1;
          next.push_back(y);
          out.push_back(y);
        }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace subfed::testing

#endif  // SUBFED_TESTS_SUPPORT_H_
