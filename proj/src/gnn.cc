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
#include "subfed/gnn.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "subfed/errors.h"

namespace subfed {

std::vector<NodeId> sample_neighbors(const Graph& g, NodeId v, int fanout,
                                     Rng& rng) {
  const auto nbrs = g.neighbors(v);
  if (nbrs.empty()) return {v};
  if (fanout == kFullNeighborhood) return {nbrs.begin(), nbrs.end()};
  const auto d = static_cast<std::size_t>(fanout);
  std::vector<NodeId> out;
  out.reserve(d);
  if (nbrs.size() >= d) {
    std::vector<NodeId> pool(nbrs.begin(), nbrs.end());
    for (std::size_t i = 0; i < d; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(pool[i]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    for (std::size_t i = 0; i < d; ++i) out.push_back(nbrs[pick(rng)]);
  }
  return out;
}

std::span<const NodeId> Computation::targets() const {
  if (blocks.empty()) return input_nodes;
  return blocks.back().dst;
}

Computation build_computation(const Graph& g, std::span<const NodeId> targets,
                              int hops, int fanout, Rng& rng) {
  Computation comp;
  comp.blocks.resize(hops);
  std::vector<NodeId> current(targets.begin(), targets.end());
  for (int k = hops - 1; k >= 0; --k) {
    Block& b = comp.blocks[k];
    b.dst = current;
    std::unordered_map<NodeId, int> index;
    std::vector<NodeId> src;
    auto locate = [&](NodeId u) {
      auto [it, inserted] = index.emplace(u, static_cast<int>(src.size()));
      if (inserted) src.push_back(u);
      return it->second;
    };
    b.self_index.reserve(b.dst.size());
    for (NodeId v : b.dst) b.self_index.push_back(locate(v));
    b.neighbor_index.resize(b.dst.size());
    for (std::size_t i = 0; i < b.dst.size(); ++i) {
      for (NodeId u : sample_neighbors(g, b.dst[i], fanout, rng))
        b.neighbor_index[i].push_back(locate(u));
    }
    current = std::move(src);
  }
  comp.input_nodes = std::move(current);
  return comp;
}

namespace {

void mean_rows(const std::vector<int>& idx,
               const std::function<std::span<const double>(int)>& row,
               std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int j : idx) {
    auto r = row(j);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += r[c];
  }
  const double inv = 1.0 / static_cast<double>(idx.size());
  for (double& x : out) x *= inv;
}

}  // namespace

// ---------------------------------------------------------------------------
// SageModel

SageModel::SageModel(SageConfig config, Rng& rng) : config_(std::move(config)) {
  if (config_.layers < 1) throw ArgumentError("GraphSage needs >= 1 layer");
  for (int k = 1; k <= config_.layers; ++k) {
    const std::size_t in = k == 1 ? config_.input_dim : config_.hidden_dim;
    params_.add(weight_name(k), glorot(config_.hidden_dim, 2 * in, rng));
  }
  if (config_.num_classes > 0)
    params_.add(head_name(),
                glorot(config_.num_classes, config_.hidden_dim, rng));
}

std::string SageModel::weight_name(int layer) const {
  return config_.prefix + ".W" + std::to_string(layer);
}

std::string SageModel::head_name() const { return config_.prefix + ".head"; }

SageCache SageModel::forward(const Graph& g, const Computation& comp) const {
  const int layers = config_.layers;
  if (static_cast<int>(comp.blocks.size()) != layers)
    throw DimensionError("computation depth " +
                         std::to_string(comp.blocks.size()) +
                         " != GraphSage depth " + std::to_string(layers));
  SageCache cache;
  cache.pre.resize(layers);
  cache.act.resize(layers);
  for (int k = 0; k < layers; ++k) {
    const Block& b = comp.blocks[k];
    const std::size_t in = k == 0 ? config_.input_dim : config_.hidden_dim;
    const Matrix& w = params_.value(weight_name(k + 1));
    auto input_row = [&](int idx) -> std::span<const double> {
      if (k == 0) return g.feature(comp.input_nodes[idx]);
      return cache.act[k - 1].row(idx);
    };
    Matrix& pre = cache.pre[k];
    pre = Matrix(b.dst.size(), config_.hidden_dim);
    std::vector<double> concat(2 * in);
    for (std::size_t i = 0; i < b.dst.size(); ++i) {
      auto self = input_row(b.self_index[i]);
      std::copy(self.begin(), self.end(), concat.begin());
      mean_rows(b.neighbor_index[i], input_row,
                std::span<double>(concat).subspan(in));
      matvec(w, concat, pre.row(i));
    }
    cache.act[k] = activate(Activation::kRelu, pre);
  }
  if (config_.num_classes > 0) {
    const Matrix& head = params_.value(head_name());
    const Matrix& top = cache.act[layers - 1];
    cache.logits = Matrix(top.rows(), config_.num_classes);
    for (std::size_t i = 0; i < top.rows(); ++i)
      matvec(head, top.row(i), cache.logits.row(i));
  }
  return cache;
}

void SageModel::backward(const Graph& g, const Computation& comp,
                         const SageCache& cache, const Matrix& grad_embedding,
                         const Matrix& grad_logits) {
  const int layers = config_.layers;
  const Matrix& top = cache.act[layers - 1];
  Matrix grad = grad_embedding.empty() ? Matrix(top.rows(), top.cols())
                                       : grad_embedding;
  if (!grad.same_shape(top))
    throw DimensionError("embedding gradient " + grad.shape_string() +
                         " vs " + top.shape_string());
  if (!grad_logits.empty()) {
    if (config_.num_classes == 0) throw StateError("model has no head");
    const Matrix& head = params_.value(head_name());
    Matrix& ghead = params_.grad(head_name());
    for (std::size_t i = 0; i < top.rows(); ++i) {
      add_outer(grad_logits.row(i), top.row(i), ghead);
      matvec_transposed_add(head, grad_logits.row(i), grad.row(i));
    }
  }
  for (int k = layers - 1; k >= 0; --k) {
    const Block& b = comp.blocks[k];
    const std::size_t in = k == 0 ? config_.input_dim : config_.hidden_dim;
    const Matrix& w = params_.value(weight_name(k + 1));
    Matrix& gw = params_.grad(weight_name(k + 1));
    activate_backward_inplace(Activation::kRelu, cache.pre[k].values(),
                              grad.values());
    auto input_row = [&](int idx) -> std::span<const double> {
      if (k == 0) return g.feature(comp.input_nodes[idx]);
      return cache.act[k - 1].row(idx);
    };
    Matrix grad_prev;
    if (k > 0) grad_prev = Matrix(cache.act[k - 1].rows(), in);
    std::vector<double> concat(2 * in), gconcat(2 * in);
    for (std::size_t i = 0; i < b.dst.size(); ++i) {
      auto self = input_row(b.self_index[i]);
      std::copy(self.begin(), self.end(), concat.begin());
      mean_rows(b.neighbor_index[i], input_row,
                std::span<double>(concat).subspan(in));
      add_outer(grad.row(i), concat, gw);
      if (k == 0) continue;
      std::fill(gconcat.begin(), gconcat.end(), 0.0);
      matvec_transposed_add(w, grad.row(i), gconcat);
      auto gself = grad_prev.row(b.self_index[i]);
      for (std::size_t c = 0; c < in; ++c) gself[c] += gconcat[c];
      const double inv = 1.0 / static_cast<double>(b.neighbor_index[i].size());
      for (int j : b.neighbor_index[i]) {
        auto gn = grad_prev.row(j);
        for (std::size_t c = 0; c < in; ++c) gn[c] += gconcat[in + c] * inv;
      }
    }
    if (k > 0) grad = std::move(grad_prev);
  }
}

Matrix SageModel::embed(const Graph& g, std::span<const NodeId> nodes) const {
  Rng unused(0);
  const auto comp =
      build_computation(g, nodes, config_.layers, kFullNeighborhood, unused);
  auto cache = forward(g, comp);
  return std::move(cache.act.back());
}

SageOutput sage_forward(const SageModel& model, const Graph& g, NodeId v,
                        int fanout, Rng& rng) {
  const NodeId target[] = {v};
  const auto comp = build_computation(g, target, model.config().layers, fanout, rng);
  const auto cache = model.forward(g, comp);
  SageOutput out;
  if (!cache.logits.empty()) {
    auto r = cache.logits.row(0);
    out.logits.assign(r.begin(), r.end());
  }
  // the target is always index 0 of every layer's node list
  for (const Matrix& act : cache.act) {
    auto r = act.row(0);
    out.hidden.emplace_back(r.begin(), r.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// FusedClassifier

std::vector<double> mean_embedding(const EmbeddingList& list, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  if (list.empty()) return out;
  for (const auto& z : list) {
    if (z.size() != dim)
      throw DimensionError("mended embedding has dimension " +
                           std::to_string(z.size()) + ", expected " +
                           std::to_string(dim));
    for (std::size_t c = 0; c < dim; ++c) out[c] += z[c];
  }
  for (double& x : out) x /= static_cast<double>(list.size());
  return out;
}

FusedClassifier::FusedClassifier(FusedConfig config, Rng& rng)
    : config_(config) {
  if (config_.layers < 1) throw ArgumentError("fused classifier needs K >= 1");
  const int K = config_.layers;
  params_.add(weight_name(0),
              glorot(config_.hidden_dim, config_.input_dim + config_.embed_dim, rng));
  for (int k = 1; k < K; ++k)
    params_.add(weight_name(k), glorot(config_.hidden_dim,
                                       config_.hidden_dim + config_.embed_dim, rng));
  params_.add(weight_name(K), glorot(config_.num_classes,
                                     config_.hidden_dim + config_.embed_dim, rng));
}

std::string FusedClassifier::weight_name(int layer) {
  return "fused.W" + std::to_string(layer);
}

namespace {

std::vector<double> node_agg(std::span<const EmbeddingList> mended, NodeId v,
                             std::size_t dim) {
  if (mended.empty()) return std::vector<double>(dim, 0.0);
  return mean_embedding(mended[v], dim);
}

}  // namespace

FusedCache FusedClassifier::forward(const Graph& g,
                                    std::span<const EmbeddingList> mended,
                                    const Computation& comp) const {
  const int K = config_.layers;
  if (static_cast<int>(comp.blocks.size()) != K)
    throw DimensionError("computation depth " +
                         std::to_string(comp.blocks.size()) +
                         " != classifier depth " + std::to_string(K));
  if (!mended.empty() && mended.size() != g.node_count())
    throw DimensionError("mended list count != node count");
  const std::size_t dx = config_.input_dim, dz = config_.embed_dim,
                    dh = config_.hidden_dim;
  FusedCache cache;
  cache.pre.resize(K + 1);
  cache.act.resize(K + 1);

  const auto& inputs = comp.input_nodes;
  cache.agg_embed = Matrix(inputs.size(), dz);
  std::unordered_map<NodeId, int> input_index;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    input_index.emplace(inputs[i], static_cast<int>(i));
    auto a = node_agg(mended, inputs[i], dz);
    std::copy(a.begin(), a.end(), cache.agg_embed.row(i).begin());
  }
  auto agg_of = [&](NodeId v) { return cache.agg_embed.row(input_index.at(v)); };

  {
    const Matrix& w = params_.value(weight_name(0));
    cache.pre[0] = Matrix(inputs.size(), dh);
    std::vector<double> concat(dx + dz);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      auto x = g.feature(inputs[i]);
      std::copy(x.begin(), x.end(), concat.begin());
      auto a = cache.agg_embed.row(i);
      std::copy(a.begin(), a.end(), concat.begin() + dx);
      matvec(w, concat, cache.pre[0].row(i));
    }
    cache.act[0] = activate(Activation::kRelu, cache.pre[0]);
  }
  for (int k = 1; k <= K; ++k) {
    const Block& b = comp.blocks[k - 1];
    const Matrix& w = params_.value(weight_name(k));
    const Matrix& prev = cache.act[k - 1];
    cache.pre[k] = Matrix(b.dst.size(), w.rows());
    std::vector<double> concat(dh + dz);
    for (std::size_t i = 0; i < b.dst.size(); ++i) {
      std::span<double> head(concat.data(), dh);
      std::fill(head.begin(), head.end(), 0.0);
      auto self = prev.row(b.self_index[i]);
      for (std::size_t c = 0; c < dh; ++c) head[c] += self[c];
      for (int j : b.neighbor_index[i]) {
        auto r = prev.row(j);
        for (std::size_t c = 0; c < dh; ++c) head[c] += r[c];
      }
      const double inv = 1.0 / static_cast<double>(1 + b.neighbor_index[i].size());
      for (double& x : head) x *= inv;
      auto a = agg_of(b.dst[i]);
      std::copy(a.begin(), a.end(), concat.begin() + dh);
      matvec(w, concat, cache.pre[k].row(i));
    }
    cache.act[k] = activate(k == K ? Activation::kIdentity : Activation::kRelu,
                            cache.pre[k]);
  }
  cache.logits = cache.act[K];
  return cache;
}

void FusedClassifier::backward(const Graph& g,
                               std::span<const EmbeddingList> mended,
                               const Computation& comp, const FusedCache& cache,
                               const Matrix& grad_logits) {
  (void)mended;  // aggregated embeddings are cached
  const int K = config_.layers;
  const std::size_t dx = config_.input_dim, dz = config_.embed_dim,
                    dh = config_.hidden_dim;
  if (!grad_logits.same_shape(cache.logits))
    throw DimensionError("logit gradient " + grad_logits.shape_string() +
                         " vs " + cache.logits.shape_string());
  std::unordered_map<NodeId, int> input_index;
  for (std::size_t i = 0; i < comp.input_nodes.size(); ++i)
    input_index.emplace(comp.input_nodes[i], static_cast<int>(i));

  Matrix grad = grad_logits;
  for (int k = K; k >= 1; --k) {
    const Block& b = comp.blocks[k - 1];
    const Matrix& w = params_.value(weight_name(k));
    Matrix& gw = params_.grad(weight_name(k));
    if (k < K)
      activate_backward_inplace(Activation::kRelu, cache.pre[k].values(),
                                grad.values());
    const Matrix& prev = cache.act[k - 1];
    Matrix grad_prev(prev.rows(), dh);
    std::vector<double> concat(dh + dz), gconcat(dh + dz);
    for (std::size_t i = 0; i < b.dst.size(); ++i) {
      std::fill(concat.begin(), concat.begin() + dh, 0.0);
      auto self = prev.row(b.self_index[i]);
      for (std::size_t c = 0; c < dh; ++c) concat[c] += self[c];
      for (int j : b.neighbor_index[i]) {
        auto r = prev.row(j);
        for (std::size_t c = 0; c < dh; ++c) concat[c] += r[c];
      }
      const double inv = 1.0 / static_cast<double>(1 + b.neighbor_index[i].size());
      for (std::size_t c = 0; c < dh; ++c) concat[c] *= inv;
      auto a = cache.agg_embed.row(input_index.at(b.dst[i]));
      std::copy(a.begin(), a.end(), concat.begin() + dh);
      add_outer(grad.row(i), concat, gw);

      std::fill(gconcat.begin(), gconcat.end(), 0.0);
      matvec_transposed_add(w, grad.row(i), gconcat);
      auto gs = grad_prev.row(b.self_index[i]);
      for (std::size_t c = 0; c < dh; ++c) gs[c] += gconcat[c] * inv;
      for (int j : b.neighbor_index[i]) {
        auto gn = grad_prev.row(j);
        for (std::size_t c = 0; c < dh; ++c) gn[c] += gconcat[c] * inv;
      }
    }
    grad = std::move(grad_prev);
  }
  activate_backward_inplace(Activation::kRelu, cache.pre[0].values(),
                            grad.values());
  Matrix& gw0 = params_.grad(weight_name(0));
  std::vector<double> concat(dx + dz);
  for (std::size_t i = 0; i < comp.input_nodes.size(); ++i) {
    auto x = g.feature(comp.input_nodes[i]);
    std::copy(x.begin(), x.end(), concat.begin());
    auto a = cache.agg_embed.row(i);
    std::copy(a.begin(), a.end(), concat.begin() + dx);
    add_outer(grad.row(i), concat, gw0);
  }
}

std::vector<double> fused_forward(const FusedClassifier& f, const Graph& g,
                                  std::span<const EmbeddingList> mended,
                                  NodeId v, int fanout, Rng& rng) {
  const NodeId target[] = {v};
  const auto comp = build_computation(g, target, f.config().layers, fanout, rng);
  const auto cache = f.forward(g, mended, comp);
  auto r = cache.logits.row(0);
  return {r.begin(), r.end()};
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::vector<std::vector<NodeId>> shuffled_batches(std::span<const NodeId> nodes,
                                                  std::size_t batch, Rng& rng) {
  std::vector<NodeId> order(nodes.begin(), nodes.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<NodeId>> out;
  for (std::size_t i = 0; i < order.size(); i += batch)
    out.emplace_back(order.begin() + i,
                     order.begin() + std::min(order.size(), i + batch));
  return out;
}

void check_loss(double loss, const char* where) {
  if (!std::isfinite(loss) || loss > 1e6)
    throw DivergenceError(std::string(where) + ": loss " + std::to_string(loss));
}

}  // namespace

LocalEmbedding train_local_gnn(ImpairedView& view, const NodeSplit& split,
                               std::size_t embed_dim, int layers,
                               const TrainOptions& options, std::uint64_t seed) {
  if (split.train.empty()) throw ArgumentError("split has no training nodes");
  const Graph& g = view.graph;
  Rng rng(seed);
  LocalEmbedding out;
  out.model = SageModel({g.feature_dim(), embed_dim,
                         static_cast<std::size_t>(g.num_classes), layers, "sage"},
                        rng);
  SageModel& model = out.model;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    double total = 0.0;
    for (const auto& batch : shuffled_batches(split.train, options.batch_size, rng)) {
      const auto comp = build_computation(g, batch, layers, options.fanout, rng);
      const auto cache = model.forward(g, comp);
      Matrix grad_logits(batch.size(), cache.logits.cols());
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        total += softmax_cross_entropy(cache.logits.row(i), g.labels[batch[i]],
                                       grad_logits.row(i));
        for (double& x : grad_logits.row(i)) x *= scale;
      }
      model.backward(g, comp, cache, Matrix(), grad_logits);
      sgd_step(model.params(), options.learning_rate);
    }
    const double mean = total / static_cast<double>(split.train.size());
    check_loss(mean, "local embedder training");
    out.epoch_losses.push_back(mean);
  }
  out.embeddings = model.embed(g, view.retained);

  const Matrix hidden_embed = model.embed(view.base.graph, view.hidden_nodes);
  std::unordered_map<NodeId, std::size_t> row_of;
  for (std::size_t i = 0; i < view.hidden_nodes.size(); ++i)
    row_of.emplace(view.hidden_nodes[i], i);
  for (NodeId v : view.retained) {
    auto& list = view.missing_embeddings[v];
    list.clear();
    for (NodeId u : view.hidden_neighbors[v]) {
      auto r = hidden_embed.row(row_of.at(u));
      list.emplace_back(r.begin(), r.end());
    }
  }
  view.embeddings_filled = true;
  return out;
}

double train_fused_epoch(FusedClassifier& f, const Graph& g,
                         std::span<const EmbeddingList> mended,
                         std::span<const NodeId> train,
                         const TrainOptions& options, Rng& rng) {
  if (train.empty()) return 0.0;
  const int K = f.config().layers;
  double total = 0.0;
  for (const auto& batch : shuffled_batches(train, options.batch_size, rng)) {
    const auto comp = build_computation(g, batch, K, options.fanout, rng);
    const auto cache = f.forward(g, mended, comp);
    Matrix grad_logits(batch.size(), cache.logits.cols());
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      total += softmax_cross_entropy(cache.logits.row(i), g.labels[batch[i]],
                                     grad_logits.row(i));
      for (double& x : grad_logits.row(i)) x *= scale;
    }
    f.backward(g, mended, comp, cache, grad_logits);
    sgd_step(f.params(), options.learning_rate);
  }
  const double mean = total / static_cast<double>(train.size());
  check_loss(mean, "classifier training");
  return mean;
}

std::vector<int> predict(const FusedClassifier& f, const Graph& g,
                         std::span<const EmbeddingList> mended,
                         std::span<const NodeId> nodes) {
  Rng unused(0);
  const auto comp =
      build_computation(g, nodes, f.config().layers, kFullNeighborhood, unused);
  const auto cache = f.forward(g, mended, comp);
  std::vector<int> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto r = cache.logits.row(i);
    out.push_back(static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin()));
  }
  return out;
}

double accuracy(const FusedClassifier& f, const Graph& g,
                std::span<const EmbeddingList> mended,
                std::span<const NodeId> nodes) {
  if (nodes.empty()) throw ArgumentError("empty query set");
  const auto pred = predict(f, g, mended, nodes);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    correct += pred[i] == g.labels[nodes[i]];
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

// ---------------------------------------------------------------------------
// Receptive field

namespace {

void randomize_positive(ParamStore& params, Rng& rng) {
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  for (auto& [name, p] : params)
    for (double& v : p.value.values()) v = dist(rng);
}

Matrix all_logits(const FusedClassifier& f, const SageModel* embedder,
                  const Graph& g) {
  std::vector<NodeId> all(g.node_count());
  std::iota(all.begin(), all.end(), 0);
  std::vector<EmbeddingList> mended;
  if (embedder) {
    const Matrix z = embedder->embed(g, all);
    mended.resize(g.node_count());
    for (NodeId v : all) {
      auto r = z.row(v);
      mended[v].emplace_back(r.begin(), r.end());
    }
  }
  Rng unused(0);
  const auto comp =
      build_computation(g, all, f.config().layers, kFullNeighborhood, unused);
  return f.forward(g, mended, comp).logits;
}

}  // namespace

std::vector<std::vector<NodeId>> sensitivity_sets(const Graph& g,
                                                  int classifier_layers,
                                                  int embed_layers,
                                                  std::uint64_t seed) {
  constexpr std::size_t kEmbedDim = 4;
  constexpr std::size_t kHidden = 4;
  Rng rng(seed);
  std::optional<SageModel> embedder;
  if (embed_layers > 0) {
    embedder.emplace(SageConfig{g.feature_dim(), kEmbedDim, 0, embed_layers, "probe"},
                     rng);
    randomize_positive(embedder->params(), rng);
  }
  FusedClassifier f({g.feature_dim(), kEmbedDim, kHidden,
                     static_cast<std::size_t>(std::max(g.num_classes, 1)),
                     classifier_layers},
                    rng);
  randomize_positive(f.params(), rng);

  const SageModel* emb = embedder ? &*embedder : nullptr;
  const Matrix base = all_logits(f, emb, g);
  std::vector<std::vector<NodeId>> sets(g.node_count());
  Graph perturbed = g;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    auto row = perturbed.features.row(u);
    for (double& x : row) x += 1.0;
    const Matrix out = all_logits(f, emb, perturbed);
    for (double& x : row) x -= 1.0;
    std::copy(g.features.row(u).begin(), g.features.row(u).end(), row.begin());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      double diff = 0.0;
      for (std::size_t c = 0; c < out.cols(); ++c)
        diff = std::max(diff, std::abs(out(v, c) - base(v, c)));
      if (diff > 1e-12 * (1.0 + std::abs(base(v, 0))))
        sets[v].push_back(static_cast<NodeId>(u));
    }
  }
  return sets;
}

}  // namespace subfed
