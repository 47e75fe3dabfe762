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
#include "subfed/proto.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "subfed/comm.h"
#include "subfed/errors.h"

namespace subfed {
namespace {

std::vector<int> assign(const Matrix& points, const Matrix& centroids) {
  std::vector<int> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(points.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    out[i] = arg;
  }
  return out;
}

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(k, points.cols());
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  std::copy(points.row(pick).begin(), points.row(pick).end(),
            centroids.row(0).begin());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(c - 1)));
      total += d2[i];
    }
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        r -= d2[i];
        if (r <= 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] <= 0.0) --pick;  // guards the rounding tail
    } else {
      pick = first(rng);
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(),
              centroids.row(c).begin());
  }
  return centroids;
}

// Recomputes means; empty clusters take over the point farthest from its
// centroid.
void update(const Matrix& points, std::vector<int>& assignment,
            Matrix& centroids) {
  const std::size_t k = centroids.rows();
  std::vector<std::size_t> counts(k, 0);
  for (int a : assignment) ++counts[a];
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    double far = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (counts[assignment[i]] <= 1) continue;
      const double d = squared_distance(points.row(i), centroids.row(assignment[i]));
      if (d > far) {
        far = d;
        arg = i;
      }
    }
    --counts[assignment[arg]];
    assignment[arg] = static_cast<int>(c);
    counts[c] = 1;
  }
  centroids.fill(0.0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto dst = centroids.row(assignment[i]);
    auto src = points.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (double& v : centroids.row(c)) v /= static_cast<double>(counts[c]);
}

}  // namespace

double kmeans_objective(const Matrix& points, const Matrix& centroids,
                        const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    total += squared_distance(points.row(i), centroids.row(assignment[i]));
  return total;
}

KMeansResult kmeans(const Matrix& points, std::size_t clusters, int max_iters,
                    std::uint64_t seed) {
  if (clusters < 1) throw ArgumentError("cluster count must be >= 1");
  if (points.rows() < clusters)
    throw ArgumentError("cannot form " + std::to_string(clusters) +
                        " clusters from " + std::to_string(points.rows()) +
                        " points");
  Rng rng(seed);
  KMeansResult result;
  result.centroids = seed_plus_plus(points, clusters, rng);
  result.assignment = assign(points, result.centroids);
  for (int it = 1; it <= std::max(max_iters, 1); ++it) {
    update(points, result.assignment, result.centroids);
    result.objective_trace.push_back(
        kmeans_objective(points, result.centroids, result.assignment));
    result.iterations = it;
    if (it == max_iters) break;
    auto next = assign(points, result.centroids);
    if (next == result.assignment) break;
    result.assignment = std::move(next);
  }
  result.member_counts.assign(clusters, 0);
  for (int a : result.assignment) ++result.member_counts[a];
  return result;
}

PrototypeSet build_prototypes(int owner, const Matrix& embeddings,
                              std::size_t clusters, std::uint64_t seed,
                              int max_iters) {
  auto km = kmeans(embeddings, clusters, max_iters, seed);
  PrototypeSet set;
  set.owner = owner;
  set.centroids = std::move(km.centroids);
  set.member_counts = std::move(km.member_counts);
  set.assignment = std::move(km.assignment);
  return set;
}

std::vector<std::vector<PrototypeSet>> broadcast_prototypes(
    const std::vector<PrototypeSet>& sets, CommLedger& ledger) {
  const std::size_t clients = sets.size();
  ledger.touch(phase::kPrototypeBroadcast);
  if (clients > 1) {
    for (const auto& s : sets)
      ledger.record(phase::kPrototypeBroadcast, Link::kInterClient, 1,
                    s.centroids.size());
  }
  return std::vector<std::vector<PrototypeSet>>(clients, sets);
}

}  // namespace subfed
