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
#ifndef SUBFED_SYNTHETIC_H_
#define SUBFED_SYNTHETIC_H_

#include <cstdint>

#include "subfed/graph.h"

namespace subfed {

// Planted-partition graph with bag-of-words style binary features: each
// class owns a block of `feature_dim / classes` words and every node draws
// `words` of them, a fraction `noise` from anywhere.
struct SyntheticSpec {
  std::size_t nodes = 200;
  int classes = 4;
  std::size_t feature_dim = 64;
  double p_in = 0.05;
  double p_out = 0.005;
  int words = 6;
  double noise = 0.3;
};

Graph synthetic_graph(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace subfed

#endif  // SUBFED_SYNTHETIC_H_
