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
#include "subfed/synthetic.h"

#include <algorithm>
#include <random>
#include <vector>

#include "subfed/errors.h"

namespace subfed {

Graph synthetic_graph(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.classes < 1 || spec.nodes < 1 ||
      spec.feature_dim < static_cast<std::size_t>(spec.classes))
    throw ArgumentError("synthetic graph: need nodes >= 1 and feature_dim >= classes");
  Rng rng(seed);
  std::vector<int> labels(spec.nodes);
  for (std::size_t v = 0; v < spec.nodes; ++v)
    labels[v] = static_cast<int>(v % static_cast<std::size_t>(spec.classes));
  std::shuffle(labels.begin(), labels.end(), rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < spec.nodes; ++u)
    for (std::size_t v = u + 1; v < spec.nodes; ++v)
      if (unit(rng) < (labels[u] == labels[v] ? spec.p_in : spec.p_out))
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));

  const std::size_t block = spec.feature_dim / static_cast<std::size_t>(spec.classes);
  std::uniform_int_distribution<std::size_t> in_block(0, block - 1);
  std::uniform_int_distribution<std::size_t> anywhere(0, spec.feature_dim - 1);
  Matrix features(spec.nodes, spec.feature_dim);
  for (std::size_t v = 0; v < spec.nodes; ++v)
    for (int w = 0; w < spec.words; ++w) {
      const std::size_t col =
          unit(rng) < spec.noise
              ? anywhere(rng)
              : static_cast<std::size_t>(labels[v]) * block + in_block(rng);
      features(v, col) = 1.0;
    }
  return build_graph(spec.nodes, edges, std::move(features), std::move(labels),
                     spec.classes);
}

}  // namespace subfed
