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
#ifndef SUBFED_PROTO_H_
#define SUBFED_PROTO_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subfed/matrix.h"

namespace subfed {

class CommLedger;  // subfed/comm.h

struct KMeansResult {
  Matrix centroids;                     // C x d
  std::vector<int> assignment;          // per input row
  std::vector<std::size_t> member_counts;
  std::vector<double> objective_trace;  // after every Lloyd iteration
  int iterations = 0;

  double objective() const {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

// Lloyd's algorithm with k-means++ seeding. Stops at an assignment fixpoint
// or after max_iters. Empty clusters are re-seeded from the point farthest
// from its centroid.
KMeansResult kmeans(const Matrix& points, std::size_t clusters,
                    int max_iters, std::uint64_t seed);

// Sum of squared distances from each point to its assigned centroid.
double kmeans_objective(const Matrix& points, const Matrix& centroids,
                        const std::vector<int>& assignment);

struct PrototypeSet {
  int owner = 0;
  Matrix centroids;  // C x d_z
  std::vector<std::size_t> member_counts;
  std::vector<int> assignment;  // cluster of each clustered embedding

  std::size_t size() const { return centroids.rows(); }
  std::size_t dim() const { return centroids.cols(); }
};

PrototypeSet build_prototypes(int owner, const Matrix& embeddings,
                              std::size_t clusters, std::uint64_t seed,
                              int max_iters = 100);

// All-to-all copy of every client's set; result[i] holds all M sets as seen
// by client i. Records one broadcast per set with at least one recipient.
std::vector<std::vector<PrototypeSet>> broadcast_prototypes(
    const std::vector<PrototypeSet>& sets, CommLedger& ledger);

}  // namespace subfed

#endif  // SUBFED_PROTO_H_
