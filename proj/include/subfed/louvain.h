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
#ifndef SUBFED_LOUVAIN_H_
#define SUBFED_LOUVAIN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "subfed/graph.h"

namespace subfed {

// Community id per node from multi-level Louvain modularity maximisation.
// Ids are dense in [0, #communities). Node visiting order is seeded.
std::vector<int> louvain_communities(const Graph& g, std::uint64_t seed);

double modularity(const Graph& g, std::span<const int> community);

struct Partition {
  std::vector<Subgraph> subgraphs;
  std::vector<int> owner;  // client id per global node
  std::size_t dropped_edges = 0;
  double dropped_fraction = 0.0;
};

// Louvain communities merged into `clients` groups: largest community first,
// each to the currently smallest group. Cross-group edges are discarded.
Partition louvain_partition(const Graph& g, int clients, std::uint64_t seed);

// Same merge and bookkeeping given a precomputed community assignment.
Partition partition_from_communities(const Graph& g,
                                     std::span<const int> community,
                                     int clients);

}  // namespace subfed

#endif  // SUBFED_LOUVAIN_H_
