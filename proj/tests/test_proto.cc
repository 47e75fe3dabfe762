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
#include <set>

#include "subfed/comm.h"
#include "subfed/errors.h"
#include "subfed/proto.h"
#include "support.h"

using namespace subfed;
using subfed::testing::random_matrix;

namespace {

Matrix recompute_centroids(const Matrix& points, const std::vector<int>& assign,
                           std::size_t clusters) {
  Matrix c(clusters, points.cols());
  std::vector<double> n(clusters, 0.0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    n[assign[i]] += 1;
    for (std::size_t d = 0; d < points.cols(); ++d) c(assign[i], d) += points(i, d);
  }
  for (std::size_t k = 0; k < clusters; ++k)
    for (std::size_t d = 0; d < points.cols(); ++d) c(k, d) /= n[k];
  return c;
}

Matrix two_blobs(std::size_t per_blob, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix m(2 * per_blob, 2);
  for (std::size_t i = 0; i < 2 * per_blob; ++i) {
    const double cx = i < per_blob ? -3.0 : 3.0;
    m(i, 0) = cx + noise(rng);
    m(i, 1) = noise(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("one cluster is the column mean") {
  Rng rng(1);
  const Matrix z = random_matrix(17, 4, rng);
  const auto res = kmeans(z, 1, 100, 3);
  for (std::size_t d = 0; d < 4; ++d) {
    double mean = 0;
    for (std::size_t i = 0; i < 17; ++i) mean += z(i, d);
    CHECK(res.centroids(0, d) == doctest::Approx(mean / 17).epsilon(1e-12));
  }
}

TEST_CASE("repeated distinct points are recovered with zero objective") {
  const Matrix points{{0, 0}, {5, 5}, {0, 0}, {-3, 2}, {5, 5}, {-3, 2}, {0, 0}};
  const auto res = kmeans(points, 3, 100, 2);
  CHECK(res.objective() == 0.0);
  std::set<std::vector<double>> got;
  for (std::size_t k = 0; k < 3; ++k)
    got.insert(std::vector<double>(res.centroids.row(k).begin(), res.centroids.row(k).end()));
  CHECK(got == std::set<std::vector<double>>{{0, 0}, {5, 5}, {-3, 2}});
}

TEST_CASE("two blobs beat random assignments") {
  Rng rng(2);
  const Matrix z = two_blobs(40, rng);
  const auto res = kmeans(z, 2, 100, 5);
  std::uniform_int_distribution<int> pick(0, 1);
  for (int b = 0; b < 20; ++b) {
    std::vector<int> assign(z.rows());
    for (auto& a : assign) a = pick(rng);
    assign[0] = 0;
    assign[1] = 1;
    CHECK(res.objective() <= kmeans_objective(z, recompute_centroids(z, assign, 2), assign));
  }
}

TEST_CASE("fewer points than clusters is an argument error") {
  CHECK_THROWS_AS(kmeans(Matrix(2, 2), 3, 10, 1), ArgumentError);
}

TEST_CASE("objective is non-increasing and centroids are a fixpoint") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + trial % 30, c = 1 + trial % 6;
    const Matrix z = random_matrix(n, 3, rng);
    const auto res = kmeans(z, c, 100, static_cast<std::uint64_t>(trial));
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-12);
    const Matrix again = recompute_centroids(z, res.assignment, c);
    for (std::size_t i = 0; i < again.size(); ++i)
      CHECK(std::abs(again.values()[i] - res.centroids.values()[i]) <= 1e-9);
    std::size_t total = 0;
    for (auto m : res.member_counts) {
      CHECK(m > 0);
      total += m;
    }
    CHECK(total == n);
  }
}

TEST_CASE("build_prototypes") {
  Rng rng(4);
  const Matrix z = random_matrix(6, 3, rng);
  const PrototypeSet own = build_prototypes(2, z, 6, 1);
  CHECK(own.owner == 2);
  CHECK(own.size() == 6);
  std::set<std::vector<double>> rows, cents;
  for (std::size_t i = 0; i < 6; ++i) {
    rows.insert(std::vector<double>(z.row(i).begin(), z.row(i).end()));
    cents.insert(std::vector<double>(own.centroids.row(i).begin(), own.centroids.row(i).end()));
  }
  CHECK(rows == cents);

  const Matrix big = random_matrix(200, 128, rng);
  const PrototypeSet a = build_prototypes(0, big, 15, 7), b = build_prototypes(0, big, 15, 7);
  CHECK(a.centroids == b.centroids);
  CHECK(a.size() == 15);
  CHECK(a.dim() == 128);

  // A centroid equals a member embedding only for singleton clusters.
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.member_counts[k] == 1) continue;
    for (std::size_t i = 0; i < big.rows(); ++i)
      CHECK(squared_distance(a.centroids.row(k), big.row(i)) > 0.0);
  }
}

TEST_CASE("broadcast accounting") {
  Rng rng(5);
  CommLedger solo;
  const auto one = broadcast_prototypes({build_prototypes(0, random_matrix(20, 4, rng), 3, 1)}, solo);
  CHECK(one.size() == 1);
  CHECK(solo.total(Link::kInterClient).values == 0);

  CommLedger ledger;
  std::vector<PrototypeSet> sets;
  for (int i = 0; i < 3; ++i)
    sets.push_back(build_prototypes(i, random_matrix(40, 128, rng), 10, i));
  const auto copies = broadcast_prototypes(sets, ledger);
  CHECK(ledger.phase(phase::kPrototypeBroadcast).inter_client.values == 3840);
  CHECK(ledger.total(Link::kInterClient).values == 3840);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(copies[i][j].centroids == sets[j].centroids);
}
