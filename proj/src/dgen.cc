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
#include "subfed/dgen.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subfed/errors.h"

namespace subfed {

DGenModel::DGenModel(DGenConfig config, Rng& rng) : config_(config) {
  if (!(config_.rate >= 0.0 && config_.rate <= 1.0))
    throw ArgumentError("sampler rate must be in [0, 1]");
  if (config_.max_count < 1) throw ArgumentError("max count must be >= 1");
  encoder_ = SageModel({config_.input_dim, config_.encoder_dim, 0,
                        config_.encoder_layers, "enc"},
                       rng);
  // Count head starts non-negative so the relu is not dead at init.
  Matrix theta_d = glorot(1, config_.encoder_dim, rng);
  for (double& v : theta_d.values()) v = std::abs(v);
  heads_.add(kCountHead, std::move(theta_d));
  heads_.add(kFeatureHead, glorot(config_.embed_dim, config_.encoder_dim, rng));
}

CountPrediction predict_count(const DGenModel& model,
                              std::span<const double> encoding) {
  const Matrix& theta_d = model.heads().value(DGenModel::kCountHead);
  CountPrediction out;
  out.continuous = activate(Activation::kRelu, dot(theta_d.row(0), encoding));
  const double rounded = std::round(out.continuous);
  out.count = static_cast<int>(
      std::clamp(rounded, 0.0, static_cast<double>(model.config().max_count)));
  return out;
}

namespace {

std::vector<double> candidate(const Matrix& theta_f, std::span<const double> enc,
                              std::span<const double> noise) {
  std::vector<double> shifted(enc.size());
  for (std::size_t c = 0; c < enc.size(); ++c) shifted[c] = enc[c] + noise[c];
  std::vector<double> out(theta_f.rows());
  matvec(theta_f, shifted, out);
  activate_inplace(Activation::kSigmoid, out);
  return out;
}

}  // namespace

CandidatePool generate_embeddings(const DGenModel& model,
                                  std::span<const double> encoding, int count,
                                  Rng& rng) {
  if (count > model.config().max_count)
    throw ArgumentError("count exceeds N_max");
  const Matrix& theta_f = model.heads().value(DGenModel::kFeatureHead);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CandidatePool pool;
  for (int p = 0; p < count; ++p) {
    std::vector<double> noise(encoding.size());
    for (double& x : noise) x = gauss(rng);
    pool.candidates.push_back(candidate(theta_f, encoding, noise));
    pool.noise.push_back(std::move(noise));
  }
  return pool;
}

std::vector<std::size_t> bernoulli_select(std::size_t pool_size, double rate,
                                          Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw ArgumentError("sampler rate must be in [0, 1]");
  std::bernoulli_distribution keep(rate);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pool_size; ++i)
    if (keep(rng)) out.push_back(i);
  return out;
}

EmbeddingList bernoulli_select(const EmbeddingList& pool, double rate, Rng& rng) {
  EmbeddingList out;
  for (std::size_t i : bernoulli_select(pool.size(), rate, rng))
    out.push_back(pool[i]);
  return out;
}

DGenBatch DGenModel::forward(const Graph& g, std::span<const NodeId> nodes,
                             int fanout, Rng& rng) const {
  DGenBatch batch;
  batch.nodes.assign(nodes.begin(), nodes.end());
  batch.comp = build_computation(g, nodes, config_.encoder_layers, fanout, rng);
  batch.encoder_cache = encoder_.forward(g, batch.comp);
  const Matrix& enc = batch.encoder_cache.act.back();
  batch.gen.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& gen = batch.gen[i];
    const auto pred = predict_count(*this, enc.row(i));
    gen.count_continuous = pred.continuous;
    gen.count = pred.count;
    auto pool = generate_embeddings(*this, enc.row(i), pred.count, rng);
    gen.pool_size = pool.candidates.size();
    for (std::size_t k : bernoulli_select(gen.pool_size, config_.rate, rng)) {
      gen.embeddings.push_back(std::move(pool.candidates[k]));
      gen.noise.push_back(std::move(pool.noise[k]));
    }
  }
  return batch;
}

void DGenModel::refresh(const Graph& g, DGenBatch& batch) const {
  batch.encoder_cache = encoder_.forward(g, batch.comp);
  const Matrix& enc = batch.encoder_cache.act.back();
  const Matrix& theta_f = heads_.value(kFeatureHead);
  for (std::size_t i = 0; i < batch.gen.size(); ++i) {
    auto& gen = batch.gen[i];
    gen.count_continuous = predict_count(*this, enc.row(i)).continuous;
    for (std::size_t p = 0; p < gen.embeddings.size(); ++p)
      gen.embeddings[p] = candidate(theta_f, enc.row(i), gen.noise[p]);
  }
}

void DGenModel::backward(const Graph& g, const DGenBatch& batch,
                         const DGenGrads& grads) {
  const Matrix& enc = batch.encoder_cache.act.back();
  const Matrix& theta_d = heads_.value(kCountHead);
  const Matrix& theta_f = heads_.value(kFeatureHead);
  Matrix& g_theta_d = heads_.grad(kCountHead);
  Matrix& g_theta_f = heads_.grad(kFeatureHead);
  Matrix grad_enc(enc.rows(), enc.cols());
  std::vector<double> shifted(enc.cols()), dpre(theta_f.rows());
  for (std::size_t i = 0; i < batch.gen.size(); ++i) {
    auto e = enc.row(i);
    auto ge = grad_enc.row(i);
    const auto& gen = batch.gen[i];
    const double gc = grads.count.empty() ? 0.0 : grads.count[i];
    if (gc != 0.0 && dot(theta_d.row(0), e) > 0.0) {
      auto gd = g_theta_d.row(0);
      auto td = theta_d.row(0);
      for (std::size_t c = 0; c < e.size(); ++c) {
        gd[c] += gc * e[c];
        ge[c] += gc * td[c];
      }
    }
    if (grads.embeddings.empty()) continue;
    for (std::size_t p = 0; p < gen.embeddings.size(); ++p) {
      const auto& z = gen.embeddings[p];
      const auto& gz = grads.embeddings[i][p];
      for (std::size_t c = 0; c < z.size(); ++c)
        dpre[c] = gz[c] * z[c] * (1.0 - z[c]);
      for (std::size_t c = 0; c < e.size(); ++c) shifted[c] = e[c] + gen.noise[p][c];
      add_outer(dpre, shifted, g_theta_f);
      matvec_transposed_add(theta_f, dpre, ge);
    }
  }
  encoder_.backward(g, batch.comp, batch.encoder_cache, grad_enc, Matrix());
}

void DGenModel::sgd_step(double learning_rate) {
  subfed::sgd_step(encoder_.params(), learning_rate);
  subfed::sgd_step(heads_, learning_rate);
}

void DGenModel::zero_grad() {
  encoder_.params().zero_grad();
  heads_.zero_grad();
}

NearestMatch nearest(std::span<const double> z, const Matrix& targets) {
  NearestMatch best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t t = 0; t < targets.rows(); ++t) {
    const double d = squared_distance(z, targets.row(t));
    if (d < best.distance) best = {d, t};
  }
  return best;
}

NearestMatch nearest(std::span<const double> z, const EmbeddingList& targets) {
  NearestMatch best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double d = squared_distance(z, targets[t]);
    if (d < best.distance) best = {d, t};
  }
  return best;
}

namespace {

template <typename Targets, typename RowFn>
double nearest_term_impl(const EmbeddingList& embeddings, const Targets& targets,
                         std::size_t target_count, RowFn row, double weight,
                         EmbeddingList& grads) {
  if (target_count == 0 || embeddings.empty()) return 0.0;
  if (grads.size() != embeddings.size()) {
    grads.resize(embeddings.size());
  }
  double loss = 0.0;
  for (std::size_t p = 0; p < embeddings.size(); ++p) {
    const auto& z = embeddings[p];
    const auto match = nearest(z, targets);
    loss += weight * match.distance;
    auto& g = grads[p];
    if (g.size() != z.size()) g.assign(z.size(), 0.0);
    auto t = row(match.index);
    for (std::size_t c = 0; c < z.size(); ++c) g[c] += 2.0 * weight * (z[c] - t[c]);
  }
  return loss;
}

void scale_grads(DGenGrads& grads, double factor) {
  for (double& c : grads.count) c *= factor;
  for (auto& list : grads.embeddings)
    for (auto& g : list)
      for (double& x : g) x *= factor;
}

DGenGrads init_grads(std::span<const GeneratedNeighbors> gen) {
  DGenGrads grads;
  grads.count.assign(gen.size(), 0.0);
  grads.embeddings.resize(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) {
    grads.embeddings[i].resize(gen[i].embeddings.size());
    for (std::size_t p = 0; p < gen[i].embeddings.size(); ++p)
      grads.embeddings[i][p].assign(gen[i].embeddings[p].size(), 0.0);
  }
  return grads;
}

void check_alignment(std::span<const NodeId> nodes,
                     std::span<const GeneratedNeighbors> gen) {
  if (nodes.size() != gen.size())
    throw DimensionError("node list and generation list differ in length");
  if (nodes.empty()) throw ArgumentError("empty node list");
}

}  // namespace

double nearest_target_term(const EmbeddingList& embeddings, const Matrix& targets,
                           double weight, EmbeddingList& grads) {
  return nearest_term_impl(
      embeddings, targets, targets.rows(),
      [&](std::size_t i) { return targets.row(i); }, weight, grads);
}

double nearest_target_term(const EmbeddingList& embeddings,
                           const EmbeddingList& targets, double weight,
                           EmbeddingList& grads) {
  return nearest_term_impl(
      embeddings, targets, targets.size(),
      [&](std::size_t i) { return std::span<const double>(targets[i]); }, weight,
      grads);
}

DGenGrads dgen_loss_local(const ImpairedView& view, std::span<const NodeId> nodes,
                          std::span<const GeneratedNeighbors> gen,
                          const LocalLossWeights& weights) {
  if (!view.embeddings_filled)
    throw StateError("missing-neighbour embeddings have not been filled");
  check_alignment(nodes, gen);
  DGenGrads grads = init_grads(gen);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    const auto sl = smooth_l1(gen[i].count_continuous - view.missing_count[v]);
    grads.loss += weights.count * sl.loss;
    grads.count[i] = weights.count * sl.derivative;
    grads.loss += nearest_target_term(gen[i].embeddings, view.missing_embeddings[v],
                                      weights.feature, grads.embeddings[i]);
  }
  const double inv = 1.0 / static_cast<double>(nodes.size());
  grads.loss *= inv;
  scale_grads(grads, inv);
  return grads;
}

DGenGrads dgen_loss_proto(const ImpairedView& view, std::span<const NodeId> nodes,
                          std::span<const GeneratedNeighbors> gen,
                          const PrototypeSet& local,
                          std::span<const PrototypeSet> foreign, int clients,
                          const ProtoLossWeights& weights) {
  if (foreign.size() + 1 != static_cast<std::size_t>(clients))
    throw StateError("expected " + std::to_string(clients - 1) +
                     " foreign prototype sets, have " +
                     std::to_string(foreign.size()));
  check_alignment(nodes, gen);
  DGenGrads grads = init_grads(gen);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    const auto sl = smooth_l1(gen[i].count_continuous - view.missing_count[v]);
    grads.loss += weights.count * sl.loss;
    grads.count[i] = weights.count * sl.derivative;
    grads.loss += nearest_target_term(gen[i].embeddings, local.centroids,
                                      weights.own, grads.embeddings[i]);
    for (const auto& set : foreign)
      grads.loss += nearest_target_term(gen[i].embeddings, set.centroids,
                                        weights.foreign, grads.embeddings[i]);
  }
  const double inv = 1.0 / static_cast<double>(nodes.size());
  grads.loss *= inv;
  scale_grads(grads, inv);
  return grads;
}

std::vector<EmbeddingList> mend_subgraph(const ImpairedView& view,
                                         std::span<const NodeId> nodes,
                                         std::span<const GeneratedNeighbors> gen) {
  if (nodes.size() != gen.size())
    throw DimensionError("node list and generation list differ in length");
  std::vector<EmbeddingList> mended(view.graph.node_count());
  for (std::size_t i = 0; i < nodes.size(); ++i) mended[nodes[i]] = gen[i].embeddings;
  return mended;
}

}  // namespace subfed
