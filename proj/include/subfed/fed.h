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
#ifndef SUBFED_FED_H_
#define SUBFED_FED_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subfed/comm.h"
#include "subfed/config.h"
#include "subfed/dgen.h"
#include "subfed/gnn.h"
#include "subfed/graph.h"
#include "subfed/louvain.h"
#include "subfed/privacy.h"
#include "subfed/proto.h"

namespace subfed {

struct ClientState {
  int id = 0;
  ImpairedView view;
  NodeSplit split;
  std::optional<LocalEmbedding> embedder;
  std::optional<DGenModel> dgen;
  FusedClassifier classifier;
  std::optional<PrototypeSet> prototypes;
  std::vector<PrototypeSet> foreign;  // M - 1 sets after the broadcast
  std::vector<EmbeddingList> mended;  // per local node
};

struct RoundLog {
  int round = 0;  // 1-based
  std::vector<double> classifier_loss;  // per client
  std::vector<double> generator_loss;   // per client, empty without a generator
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  double seconds = 0.0;  // wall clock, excluded from comparisons

  bool operator==(const RoundLog& o) const {
    return round == o.round && classifier_loss == o.classifier_loss &&
           generator_loss == o.generator_loss && val_accuracy == o.val_accuracy &&
           test_accuracy == o.test_accuracy;
  }
};

struct ClientBudget {
  int client = 0;
  bool ok = false;
  std::string status;  // "ok" or the violated precondition
  DegreeScan degree;
  PrivacyBudget budget;
};

struct BudgetReport {
  bool applicable = false;  // false for variants without a generator pipeline
  bool ok = false;
  std::string status;
  std::vector<ClientBudget> clients;
  int worst_client = -1;
  PrivacyBudget worst;
};

struct PartitionStats {
  std::vector<std::size_t> nodes;  // |V_i|
  std::vector<std::size_t> edges;  // |E_i|
  std::size_t dropped_edges = 0;   // delta E
  double dropped_fraction = 0.0;
};

struct RunResult {
  Variant variant = Variant::kFedDep;
  std::uint64_t seed = 0;
  PartitionStats partition;
  std::vector<RoundLog> rounds;
  CommLedger ledger;
  BudgetReport privacy;
  FusedClassifier global;                  // unset for the local variant
  std::vector<FusedClassifier> local_models;
  std::vector<PrototypeSet> prototypes;
  double final_val_accuracy = 0.0;
  double final_test_accuracy = 0.0;
};

// Phase one of a run: Louvain partition, impairment and node split per
// client, using the same seed streams as run_training.
struct Federation {
  Partition partition;
  std::vector<ImpairedView> views;
  std::vector<NodeSplit> splits;
};
Federation prepare_federation(const ExperimentConfig& config, const GlobalGraph& graph);

// Per-client budgets and the worst case over clients. Clients whose
// neighbourhoods violate the degree precondition are reported, not thrown.
BudgetReport account_budget(const ExperimentConfig& config,
                            std::span<const ImpairedView> views);

// Weighted per-parameter mean. Weights need not be normalised.
FusedClassifier fedavg(std::span<const FusedClassifier> replicas,
                       std::span<const double> weights);

// Accuracy with every generated embedding set to zero.
double evaluate_global(const FusedClassifier& f, const GlobalGraph& g,
                       std::span<const NodeId> queries);

using RoundCallback = std::function<void(const RoundLog&)>;

RunResult run_training(const ExperimentConfig& config, const GlobalGraph& graph,
                       const RoundCallback& on_round = {});

// Loads config.dataset.
RunResult run_training(const ExperimentConfig& config,
                       const RoundCallback& on_round = {});

std::string comm_report(const CommLedger& ledger);

}  // namespace subfed

#endif  // SUBFED_FED_H_
