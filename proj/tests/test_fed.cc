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

#include <cmath>

#include "subfed/errors.h"
#include "subfed/fed.h"
#include "support.h"

using namespace subfed;

namespace {

const Graph& fixture() {
  static const Graph g = load_graph(std::string(SUBFED_TEST_DATA) + "/sbm120.graph");
  return g;
}

ExperimentConfig small_config(Variant v, int clients = 3) {
  ExperimentConfig c;
  c.variant = v;
  c.clients = clients;
  c.embed_dim = 8;
  c.prototypes = 4;
  c.pretrain_epochs = 3;
  c.rounds = 3;
  c.seed = 11;
  return c;
}

FusedClassifier constant_model(double value, Rng& rng) {
  FusedClassifier f({2, 1, 2, 2, 1}, rng);
  for (auto& [name, p] : f.params()) p.value.fill(value);
  return f;
}

}  // namespace

TEST_CASE("fedavg") {
  Rng rng(1);
  const FusedClassifier a({3, 2, 4, 2, 2}, rng);
  const std::vector<FusedClassifier> same{a, a, a};
  const std::vector<double> w{1, 5, 2};
  const FusedClassifier avg = fedavg(same, w);
  for (const auto& [name, p] : avg.params())
    for (std::size_t i = 0; i < p.value.size(); ++i)
      CHECK(p.value.values()[i] == doctest::Approx(a.params().value(name).values()[i]).epsilon(1e-15));

  const std::vector<FusedClassifier> pair{constant_model(0.0, rng), constant_model(2.0, rng)};
  const std::vector<double> equal{1, 1};
  const FusedClassifier mid = fedavg(pair, equal);
  for (const auto& [name, p] : mid.params())
    for (double x : p.value.values()) CHECK(x == 1.0);

  const std::vector<FusedClassifier> three{constant_model(1.0, rng), constant_model(4.0, rng),
                                           constant_model(-2.0, rng)};
  const std::vector<double> ws{1, 2, 3};
  const double expected = (1 * 1.0 + 2 * 4.0 + 3 * -2.0) / 6.0;
  const FusedClassifier weighted = fedavg(three, ws);
  for (const auto& [name, p] : weighted.params())
    for (double x : p.value.values()) CHECK(x == doctest::Approx(expected).epsilon(1e-14));

  const std::vector<FusedClassifier> mixed{a, constant_model(1.0, rng)};
  CHECK_THROWS_AS(fedavg(mixed, equal), StateError);
}

TEST_CASE("evaluate_global") {
  Rng rng(2);
  const Graph& g = fixture();
  std::vector<NodeId> all(g.node_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
  double total = 0;
  for (int t = 0; t < 20; ++t) {
    FusedClassifier f({g.feature_dim(), 4, 4, 3, 2}, rng);
    const double acc = evaluate_global(f, g, all);
    CHECK((acc >= 0.0 && acc <= 1.0));
    total += acc;
  }
  CHECK(std::abs(total / 20 - 1.0 / 3.0) < 0.1);
  FusedClassifier f({g.feature_dim(), 4, 4, 3, 2}, rng);
  CHECK_THROWS_AS(evaluate_global(f, g, std::vector<NodeId>{}), ArgumentError);

  // Two cliques with one-hot features are memorised perfectly.
  std::vector<Edge> edges;
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) edges.emplace_back(6 * c + a, 6 * c + b);
  Matrix x(12, 2);
  std::vector<int> labels(12);
  for (int v = 0; v < 12; ++v) {
    labels[v] = v / 6;
    x(v, labels[v]) = 1.0;
  }
  const Graph toy = build_graph(12, edges, x, labels, 2);
  FusedClassifier h({2, 2, 8, 2, 1}, rng);
  std::vector<NodeId> nodes(12);
  for (int i = 0; i < 12; ++i) nodes[i] = i;
  std::vector<EmbeddingList> none(12);
  TrainOptions opts;
  for (int e = 0; e < 100; ++e) train_fused_epoch(h, toy, none, nodes, opts, rng);
  CHECK(evaluate_global(h, toy, nodes) == 1.0);
}

TEST_CASE("feddep ledger: no generator-phase traffic, exact prototype broadcast") {
  const auto cfg = small_config(Variant::kFedDep);
  const RunResult r = run_training(cfg, fixture());
  CHECK(r.ledger.phase(phase::kDGenTraining).inter_client.values == 0);
  CHECK(r.ledger.phase(phase::kDGenTraining).inter_client.messages == 0);
  CHECK(r.ledger.phase(phase::kLocalPretraining).inter_client.values == 0);
  const std::size_t expected = 3 * 4 * 8;
  CHECK(r.ledger.phase(phase::kPrototypeBroadcast).inter_client.values == expected);
  CHECK(r.ledger.generator_values() == expected);
  CHECK(r.ledger.total(Link::kInterClient).values == expected);
  CHECK(r.rounds.size() == 3);
  for (const auto& log : r.rounds) {
    CHECK((log.test_accuracy >= 0.0 && log.test_accuracy <= 1.0));
    CHECK(log.generator_loss.size() == 3);
  }
  const std::string report = comm_report(r.ledger);
  CHECK(report.find("prototype_broadcast") != std::string::npos);
  CHECK(report.find("generator traffic: 96 values") != std::string::npos);
}

TEST_CASE("embedding sharing costs more than prototypes; fedavg has no generator traffic") {
  const RunResult proto = run_training(small_config(Variant::kFedDep), fixture());
  const RunResult share = run_training(small_config(Variant::kFedDepNoProto), fixture());
  const RunResult avg = run_training(small_config(Variant::kFedAvg), fixture());
  CHECK(share.ledger.generator_values() > proto.ledger.generator_values());
  CHECK(share.ledger.phase(phase::kDGenTraining).inter_client.values > 0);
  CHECK(avg.ledger.generator_values() == 0);
  CHECK(avg.ledger.total(Link::kInterClient).values == 0);
}

TEST_CASE("a single client never talks to another client") {
  for (Variant v : {Variant::kLocal, Variant::kFedAvg, Variant::kFedDepNoDGen,
                    Variant::kFedDepNoProto, Variant::kFedDep}) {
    const RunResult r = run_training(small_config(v, 1), fixture());
    CHECK(r.ledger.total(Link::kInterClient).messages == 0);
    CHECK(r.ledger.total(Link::kInterClient).values == 0);
  }
}

TEST_CASE("local with one client matches federated averaging with one client") {
  const RunResult local = run_training(small_config(Variant::kLocal, 1), fixture());
  const RunResult avg = run_training(small_config(Variant::kFedAvg, 1), fixture());
  CHECK(local.rounds == avg.rounds);
  CHECK(local.ledger.total(Link::kClientServer).values == 0);
}

TEST_CASE("runs are deterministic, serial or parallel") {
  auto cfg = small_config(Variant::kFedDep);
  const RunResult a = run_training(cfg, fixture());
  const RunResult b = run_training(cfg, fixture());
  cfg.threads = 1;
  const RunResult c = run_training(cfg, fixture());
  CHECK(a.rounds == b.rounds);
  CHECK(a.rounds == c.rounds);
  CHECK(a.final_test_accuracy == c.final_test_accuracy);
  CHECK(a.ledger.phases() == c.ledger.phases());
  cfg.seed = 12;
  CHECK_FALSE(run_training(cfg, fixture()).rounds == a.rounds);
}

TEST_CASE("prototype ablation mends each node with its own centroid") {
  const RunResult r = run_training(small_config(Variant::kFedDepNoDGen), fixture());
  CHECK(r.prototypes.size() == 3);
  CHECK(r.ledger.generator_values() == 0);
  CHECK(r.privacy.applicable);
}

TEST_CASE("divergence names the round") {
  auto cfg = small_config(Variant::kFedAvg);
  cfg.learning_rate = 1e9;
  try {
    run_training(cfg, fixture());
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("round ") != std::string::npos);
  }
}

TEST_CASE("invalid configs are rejected") {
  auto cfg = small_config(Variant::kFedDep);
  cfg.clients = 0;
  CHECK_THROWS_AS(run_training(cfg, fixture()), ArgumentError);
  cfg = small_config(Variant::kFedDep);
  cfg.impair_ratio = 1.0;
  CHECK_THROWS_AS(run_training(cfg, fixture()), ArgumentError);
}

TEST_CASE("privacy report covers every client") {
  const RunResult r = run_training(small_config(Variant::kFedDep), fixture());
  CHECK(r.privacy.applicable);
  CHECK(r.privacy.clients.size() == 3);
  for (const auto& c : r.privacy.clients) {
    if (c.ok) {
      CHECK(c.degree.degree >= 1);
      CHECK(c.budget.trace.size() == 3);
    } else {
      CHECK(c.degree.degree == 0);
      CHECK(c.status.find("degree precondition violated") != std::string::npos);
    }
  }
  const RunResult avg = run_training(small_config(Variant::kFedAvg), fixture());
  CHECK_FALSE(avg.privacy.applicable);
}
