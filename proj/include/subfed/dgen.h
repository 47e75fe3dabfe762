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
#ifndef SUBFED_DGEN_H_
#define SUBFED_DGEN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "subfed/gnn.h"
#include "subfed/graph.h"
#include "subfed/nn.h"
#include "subfed/proto.h"

namespace subfed {

struct DGenConfig {
  std::size_t input_dim = 0;    // d_x
  std::size_t embed_dim = 0;    // d_z, generated embedding width
  std::size_t encoder_dim = 0;  // d_e
  int encoder_layers = 2;       // hops of the encoder's ego-graph
  int max_count = 5;            // N_max
  double rate = 0.5;            // Bernoulli keep probability r
};

struct CountPrediction {
  double continuous = 0.0;  // relu(theta_d . enc), drives the loss
  int count = 0;            // clip(round(continuous), 0, N_max)
};

struct GeneratedNeighbors {
  double count_continuous = 0.0;
  int count = 0;
  std::size_t pool_size = 0;
  EmbeddingList embeddings;  // selected candidates
  EmbeddingList noise;       // Gaussian draw behind each selected candidate
};

// Generator state for one batch: the encoder computation and every random
// draw, so the batch can be re-evaluated with randomness frozen.
struct DGenBatch {
  std::vector<NodeId> nodes;
  Computation comp;
  SageCache encoder_cache;
  std::vector<GeneratedNeighbors> gen;
};

struct DGenGrads {
  double loss = 0.0;
  std::vector<double> count;                // d loss / d count_continuous
  std::vector<EmbeddingList> embeddings;    // d loss / d selected embeddings
};

class DGenModel {
 public:
  DGenModel() = default;
  DGenModel(DGenConfig config, Rng& rng);

  const DGenConfig& config() const { return config_; }
  SageModel& encoder() { return encoder_; }
  const SageModel& encoder() const { return encoder_; }
  ParamStore& heads() { return heads_; }
  const ParamStore& heads() const { return heads_; }

  static constexpr const char* kCountHead = "dgen.theta_d";    // 1 x d_e
  static constexpr const char* kFeatureHead = "dgen.theta_f";  // d_z x d_e

  // Encodes `nodes`, predicts counts, draws candidates and selects them.
  DGenBatch forward(const Graph& g, std::span<const NodeId> nodes, int fanout,
                    Rng& rng) const;
  // Recomputes continuous counts and selected embeddings from the stored
  // draws, keeping rounded counts and selections fixed.
  void refresh(const Graph& g, DGenBatch& batch) const;
  void backward(const Graph& g, const DGenBatch& batch, const DGenGrads& grads);
  void sgd_step(double learning_rate);
  void zero_grad();

 private:
  DGenConfig config_;
  SageModel encoder_;
  ParamStore heads_;
};

CountPrediction predict_count(const DGenModel& model,
                              std::span<const double> encoding);

struct CandidatePool {
  EmbeddingList candidates;
  EmbeddingList noise;
};

// Candidate p = sigmoid(theta_f (enc + g_p)), g_p ~ N(0, I).
CandidatePool generate_embeddings(const DGenModel& model,
                                  std::span<const double> encoding, int count,
                                  Rng& rng);

// Independent keep with probability `rate`; returns kept indices in order.
std::vector<std::size_t> bernoulli_select(std::size_t pool_size, double rate,
                                          Rng& rng);
EmbeddingList bernoulli_select(const EmbeddingList& pool, double rate, Rng& rng);

struct LocalLossWeights {
  double count = 1.0;    // lambda_d
  double feature = 1.0;  // lambda_f
};

struct ProtoLossWeights {
  double count = 1.0;    // beta_d
  double own = 1.0;      // beta_f
  double foreign = 1.0;  // beta_n
};

struct NearestMatch {
  double distance = 0.0;  // squared L2
  std::size_t index = 0;
};

NearestMatch nearest(std::span<const double> z, const Matrix& targets);
NearestMatch nearest(std::span<const double> z, const EmbeddingList& targets);

// Reconstruction term against one target set: sum over embeddings of the
// squared distance to the nearest target, scaled by `weight`. Gradients are
// accumulated into `grads` (aligned with `embeddings`).
double nearest_target_term(const EmbeddingList& embeddings, const Matrix& targets,
                           double weight, EmbeddingList& grads);
double nearest_target_term(const EmbeddingList& embeddings,
                           const EmbeddingList& targets, double weight,
                           EmbeddingList& grads);

// Loss against ground-truth hidden-neighbour embeddings, averaged over
// `nodes`. Requires view.missing_embeddings.
DGenGrads dgen_loss_local(const ImpairedView& view, std::span<const NodeId> nodes,
                          std::span<const GeneratedNeighbors> gen,
                          const LocalLossWeights& weights);

// Loss against prototype sets: own set for the beta_f term and one nearest
// match per foreign set for the beta_n term.
DGenGrads dgen_loss_proto(const ImpairedView& view, std::span<const NodeId> nodes,
                          std::span<const GeneratedNeighbors> gen,
                          const PrototypeSet& local,
                          std::span<const PrototypeSet> foreign, int clients,
                          const ProtoLossWeights& weights);

// Per-node mended embedding lists for the view's local id space. Nodes not
// in `nodes` get empty lists.
std::vector<EmbeddingList> mend_subgraph(const ImpairedView& view,
                                         std::span<const NodeId> nodes,
                                         std::span<const GeneratedNeighbors> gen);

}  // namespace subfed

#endif  // SUBFED_DGEN_H_
