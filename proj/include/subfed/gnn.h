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
#ifndef SUBFED_GNN_H_
#define SUBFED_GNN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subfed/graph.h"
#include "subfed/matrix.h"
#include "subfed/nn.h"

namespace subfed {

using EmbeddingList = std::vector<std::vector<double>>;

// Fanout 0 means full neighbourhood aggregation (no sampling).
inline constexpr int kFullNeighborhood = 0;

// Neighbour draw for one node:
//   deg >= d      d distinct neighbours, uniform without replacement
//   0 < deg < d   d draws with replacement
//   deg == 0      [v]
// With fanout == kFullNeighborhood the whole neighbour list is returned
// (still [v] for an isolated node).
std::vector<NodeId> sample_neighbors(const Graph& g, NodeId v, int fanout,
                                     Rng& rng);

// One message-passing hop. `src` indices refer to the previous layer's node
// list.
struct Block {
  std::vector<NodeId> dst;
  std::vector<int> self_index;
  std::vector<std::vector<int>> neighbor_index;
};

// Layered computation graph for a batch of target nodes. blocks[0] consumes
// input_nodes; blocks.back().dst are the targets in request order.
struct Computation {
  std::vector<NodeId> input_nodes;
  std::vector<Block> blocks;

  std::span<const NodeId> targets() const;
};

Computation build_computation(const Graph& g, std::span<const NodeId> targets,
                              int hops, int fanout, Rng& rng);

// ---------------------------------------------------------------------------
// GraphSage with mean aggregator:
//   h^k_v = relu(W^k [h^{k-1}_v || mean(h^{k-1}_u : u sampled)])
// The depth-L hidden vector is the node embedding; an optional linear head
// maps it to class logits.

struct SageConfig {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;   // d_z
  std::size_t num_classes = 0;  // 0 disables the head
  int layers = 2;
  std::string prefix = "sage";
};

struct SageCache {
  // pre[k] / act[k]: rows aligned with blocks[k].dst
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
  Matrix logits;  // targets x classes, empty without a head
};

class SageModel {
 public:
  SageModel() = default;
  SageModel(SageConfig config, Rng& rng);

  const SageConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  std::string weight_name(int layer) const;  // layer in [1, L]
  std::string head_name() const;

  SageCache forward(const Graph& g, const Computation& comp) const;

  // Accumulates parameter gradients. Either upstream may be empty.
  void backward(const Graph& g, const Computation& comp, const SageCache& cache,
                const Matrix& grad_embedding, const Matrix& grad_logits);

  // Full-neighbourhood embeddings for `nodes` (rows in the same order).
  Matrix embed(const Graph& g, std::span<const NodeId> nodes) const;

 private:
  SageConfig config_;
  ParamStore params_;
};

struct SageOutput {
  std::vector<double> logits;
  std::vector<std::vector<double>> hidden;  // per layer, last = embedding
};

SageOutput sage_forward(const SageModel& model, const Graph& g, NodeId v,
                        int fanout, Rng& rng);

// ---------------------------------------------------------------------------
// Embedding-fused graph convolution:
//   x^0_v = relu(W^(0) [x_v || a_v])
//   x^k_v = relu(W^(k) [mean(x^{k-1}_u : u in {v} + N(v)) || a_v]), k < K
//   logits_v = W^(K) [mean(x^{K-1}_u : u in {v} + N(v)) || a_v]
// with a_v the mean of v's mended embeddings, or zero when it has none.

struct FusedConfig {
  std::size_t input_dim = 0;   // d_x
  std::size_t embed_dim = 0;   // d_z
  std::size_t hidden_dim = 0;  // d_h
  std::size_t num_classes = 0;
  int layers = 2;  // K
};

struct FusedCache {
  Matrix agg_embed;           // rows aligned with input_nodes
  std::vector<Matrix> pre;    // pre[0] on input_nodes, pre[k] on blocks[k-1].dst
  std::vector<Matrix> act;
  Matrix logits;              // targets x classes
};

class FusedClassifier {
 public:
  FusedClassifier() = default;
  FusedClassifier(FusedConfig config, Rng& rng);

  const FusedConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  static std::string weight_name(int layer);  // layer in [0, K]

  // `mended` is indexed by graph node id; an empty span means no node has
  // mended embeddings.
  FusedCache forward(const Graph& g, std::span<const EmbeddingList> mended,
                     const Computation& comp) const;
  void backward(const Graph& g, std::span<const EmbeddingList> mended,
                const Computation& comp, const FusedCache& cache,
                const Matrix& grad_logits);

 private:
  FusedConfig config_;
  ParamStore params_;
};

std::vector<double> fused_forward(const FusedClassifier& f, const Graph& g,
                                  std::span<const EmbeddingList> mended,
                                  NodeId v, int fanout, Rng& rng);

std::vector<double> mean_embedding(const EmbeddingList& list, std::size_t dim);

// ---------------------------------------------------------------------------
// Training helpers.

struct TrainOptions {
  int epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  int fanout = 5;
};

struct LocalEmbedding {
  SageModel model;
  // Rows aligned with view.retained.
  Matrix embeddings;
  std::vector<double> epoch_losses;
};

// Trains the local embedder on the impaired view, then writes ground-truth
// embeddings of every hidden neighbour (computed on the un-impaired subgraph)
// into view.missing_embeddings.
LocalEmbedding train_local_gnn(ImpairedView& view, const NodeSplit& split,
                               std::size_t embed_dim, int layers,
                               const TrainOptions& options, std::uint64_t seed);

// One epoch of mini-batch SGD on cross-entropy over `train`. Returns the mean
// per-node loss.
double train_fused_epoch(FusedClassifier& f, const Graph& g,
                         std::span<const EmbeddingList> mended,
                         std::span<const NodeId> train,
                         const TrainOptions& options, Rng& rng);

// Full-neighbourhood predictions.
std::vector<int> predict(const FusedClassifier& f, const Graph& g,
                         std::span<const EmbeddingList> mended,
                         std::span<const NodeId> nodes);

double accuracy(const FusedClassifier& f, const Graph& g,
                std::span<const EmbeddingList> mended,
                std::span<const NodeId> nodes);

// ---------------------------------------------------------------------------
// Receptive-field probe. Builds an L-layer embedder and a K-layer fused
// classifier with strictly positive random weights, mends every node with its
// own embedding (none when L == 0), and reports for each node v the set of
// nodes whose feature perturbation changes v's output under full
// aggregation. Expected: the (K + L)-hop ego node set of v.
std::vector<std::vector<NodeId>> sensitivity_sets(const Graph& g, int classifier_layers,
                                                  int embed_layers,
                                                  std::uint64_t seed);

}  // namespace subfed

#endif  // SUBFED_GNN_H_
