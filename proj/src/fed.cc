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
#include "subfed/fed.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

#include "subfed/errors.h"
#include "subfed/louvain.h"

namespace subfed {

FusedClassifier fedavg(std::span<const FusedClassifier> replicas,
                       std::span<const double> weights) {
  if (replicas.empty()) throw ArgumentError("fedavg needs at least one replica");
  if (weights.size() != replicas.size())
    throw ArgumentError("fedavg: one weight per replica required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ArgumentError("fedavg weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ArgumentError("fedavg weights sum to zero");
  for (const auto& r : replicas)
    if (!r.params().same_layout(replicas.front().params()))
      throw StateError("fedavg: replicas have different parameter shapes");

  FusedClassifier out = replicas.front();
  for (auto& [name, param] : out.params()) {
    param.value.fill(0.0);
    param.grad.fill(0.0);
    for (std::size_t i = 0; i < replicas.size(); ++i)
      axpy(weights[i] / total, replicas[i].params().value(name), param.value);
  }
  return out;
}

double evaluate_global(const FusedClassifier& f, const GlobalGraph& g,
                       std::span<const NodeId> queries) {
  return accuracy(f, g, {}, queries);
}

namespace {

// Seed streams; client streams are spaced so that adding a stream never
// shifts another.
constexpr std::uint64_t kPartitionStream = 1;
constexpr std::uint64_t kClassifierInitStream = 2;
std::uint64_t client_stream(int client, int slot) {
  return 1000 + static_cast<std::uint64_t>(client) * 16 + slot;
}
enum Slot { kImpair, kSplit, kEmbedder, kPrototypes, kGenerator, kTraining };

bool uses_generator(Variant v) {
  return v == Variant::kFedDep || v == Variant::kFedDepNoProto;
}
bool uses_embedder(Variant v) {
  return v == Variant::kFedDep || v == Variant::kFedDepNoProto ||
         v == Variant::kFedDepNoDGen;
}

// Runs fn(i) for every client, one worker each (capped by `threads`), and
// rethrows the lowest-indexed failure.
template <typename Fn>
void for_each_client(int clients, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(clients);
  auto guarded = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int workers = threads == 0 ? clients : std::min(threads, clients);
  if (workers <= 1) {
    for (int i = 0; i < clients; ++i) guarded(i);
  } else {
    for (int start = 0; start < clients; start += workers) {
      std::vector<std::thread> pool;
      for (int i = start; i < std::min(clients, start + workers); ++i)
        pool.emplace_back(guarded, i);
      for (auto& t : pool) t.join();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::vector<NodeId>> batches_of(std::vector<NodeId> nodes,
                                            std::size_t batch, Rng* rng) {
  if (rng) std::shuffle(nodes.begin(), nodes.end(), *rng);
  std::vector<std::vector<NodeId>> out;
  for (std::size_t s = 0; s < nodes.size(); s += batch)
    out.emplace_back(nodes.begin() + s,
                     nodes.begin() + std::min(nodes.size(), s + batch));
  return out;
}

struct Context {
  const ExperimentConfig& config;
  std::vector<ClientState>& clients;
  CommLedger& ledger;
};

double generator_epoch(Context& ctx, int i, Rng& rng) {
  const auto& cfg = ctx.config;
  ClientState& c = ctx.clients[i];
  const Graph& g = c.view.graph;
  const int M = cfg.clients;
  const std::size_t dz = static_cast<std::size_t>(cfg.embed_dim);
  double total = 0.0;
  for (const auto& batch :
       batches_of(c.view.retained, static_cast<std::size_t>(cfg.batch_size), &rng)) {
    DGenBatch b = c.dgen->forward(g, batch, cfg.fanout, rng);
    DGenGrads grads;
    if (cfg.variant == Variant::kFedDep) {
      grads = dgen_loss_proto(c.view, batch, b.gen, *c.prototypes, c.foreign, M,
                              {cfg.beta_d, cfg.beta_f, cfg.beta_n});
    } else {
      grads = dgen_loss_local(c.view, batch, b.gen, {cfg.lambda_d, cfg.lambda_f});
      // Every other client scores the generated embeddings against its own
      // node embeddings and returns the gradient.
      const double w = cfg.beta_n / static_cast<double>(batch.size());
      std::size_t shipped = 0;
      for (const auto& gen : b.gen) shipped += gen.embeddings.size() * dz;
      for (int j = 0; j < M; ++j) {
        if (j == i) continue;
        const Matrix& remote = ctx.clients[j].embedder->embeddings;
        for (std::size_t k = 0; k < batch.size(); ++k)
          grads.loss +=
              nearest_target_term(b.gen[k].embeddings, remote, w, grads.embeddings[k]);
        ctx.ledger.record(phase::kDGenTraining, Link::kInterClient, 2, 2 * shipped);
      }
    }
    if (!std::isfinite(grads.loss) || grads.loss > 1e6)
      throw DivergenceError("generator training: loss " + std::to_string(grads.loss));
    c.dgen->backward(g, b, grads);
    c.dgen->sgd_step(cfg.learning_rate);
    total += grads.loss * static_cast<double>(batch.size());
  }
  return c.view.retained.empty()
             ? 0.0
             : total / static_cast<double>(c.view.retained.size());
}

void regenerate(Context& ctx, int i, Rng& rng) {
  ClientState& c = ctx.clients[i];
  std::vector<GeneratedNeighbors> gen;
  gen.reserve(c.view.retained.size());
  for (const auto& batch : batches_of(c.view.retained, 256, nullptr)) {
    DGenBatch b = c.dgen->forward(c.view.graph, batch, ctx.config.fanout, rng);
    for (auto& x : b.gen) gen.push_back(std::move(x));
  }
  c.mended = mend_subgraph(c.view, c.view.retained, gen);
}

void mend_with_centroids(ClientState& c) {
  c.mended.assign(c.view.graph.node_count(), {});
  const auto& set = *c.prototypes;
  for (std::size_t k = 0; k < c.view.retained.size(); ++k) {
    auto row = set.centroids.row(static_cast<std::size_t>(set.assignment[k]));
    c.mended[c.view.retained[k]] = {std::vector<double>(row.begin(), row.end())};
  }
}

}  // namespace

BudgetReport account_budget(const ExperimentConfig& cfg,
                            std::span<const ImpairedView> views) {
  BudgetReport report;
  report.applicable = uses_embedder(cfg.variant);
  if (!report.applicable) {
    report.status = "not applicable";
    return report;
  }
  AccountantInput input;
  input.fanout = static_cast<std::size_t>(cfg.fanout);
  input.layers = cfg.embed_layers;
  input.epochs = cfg.pretrain_epochs;
  // The prototype-only ablation has no Bernoulli sampler to amplify with.
  input.rate = uses_generator(cfg.variant) ? cfg.sampler_rate : 1.0;
  input.delta_prime = cfg.delta_prime;
  input.delta_mode = cfg.printed_delta ? DeltaComposition::kPrintedForm
                                       : DeltaComposition::kFailureProbability;
  report.ok = true;
  for (std::size_t i = 0; i < views.size(); ++i) {
    ClientBudget entry;
    entry.client = static_cast<int>(i);
    entry.degree = min_retained_degree(views[i], cfg.embed_layers);
    try {
      const GraphBudget gb = budget_for_graph(views[i], input);
      entry.budget = gb.budget;
      entry.ok = true;
      entry.status = "ok";
      if (report.worst_client < 0 || gb.budget.epsilon > report.worst.epsilon ||
          (gb.budget.epsilon == report.worst.epsilon &&
           gb.budget.delta > report.worst.delta)) {
        report.worst_client = entry.client;
        report.worst = gb.budget;
      }
    } catch (const ArgumentError& e) {
      entry.status = e.what();
      report.ok = false;
    }
    report.clients.push_back(std::move(entry));
  }
  report.status = report.ok ? "ok" : "degree precondition violated";
  return report;
}

Federation prepare_federation(const ExperimentConfig& cfg, const GlobalGraph& graph) {
  Federation fed;
  fed.partition = louvain_partition(graph, cfg.clients,
                                    derive_seed(cfg.seed, kPartitionStream));
  for (int i = 0; i < cfg.clients; ++i) {
    fed.views.push_back(impair(fed.partition.subgraphs[i], cfg.impair_ratio,
                               derive_seed(cfg.seed, client_stream(i, kImpair))));
    fed.splits.push_back(
        split_nodes(fed.views.back(), derive_seed(cfg.seed, client_stream(i, kSplit))));
  }
  return fed;
}

RunResult run_training(const ExperimentConfig& cfg, const GlobalGraph& graph,
                       const RoundCallback& on_round) {
  cfg.validate();
  graph.validate();
  const int M = cfg.clients;
  const Variant variant = cfg.variant;
  RunResult result;
  result.variant = variant;
  result.seed = cfg.seed;

  // (1) partition, impair, split
  Federation fed = prepare_federation(cfg, graph);
  result.partition.dropped_edges = fed.partition.dropped_edges;
  result.partition.dropped_fraction = fed.partition.dropped_fraction;
  std::vector<ClientState> clients(M);
  for (int i = 0; i < M; ++i) {
    const Subgraph& sub = fed.partition.subgraphs[i];
    result.partition.nodes.push_back(sub.graph.node_count());
    result.partition.edges.push_back(sub.graph.edge_count());
    clients[i].id = i;
    clients[i].view = std::move(fed.views[i]);
    clients[i].split = std::move(fed.splits[i]);
  }
  std::vector<NodeId> val_queries, test_queries;
  for (const auto& c : clients) {
    for (NodeId v : c.split.val) val_queries.push_back(c.view.base.global_ids[v]);
    for (NodeId v : c.split.test) test_queries.push_back(c.view.base.global_ids[v]);
  }
  std::sort(val_queries.begin(), val_queries.end());
  std::sort(test_queries.begin(), test_queries.end());

  CommLedger& ledger = result.ledger;
  Context ctx{cfg, clients, ledger};
  TrainOptions options;
  options.epochs = cfg.pretrain_epochs;
  options.batch_size = static_cast<std::size_t>(cfg.batch_size);
  options.learning_rate = cfg.learning_rate;
  options.fanout = cfg.fanout;
  const std::size_t dz = static_cast<std::size_t>(cfg.embed_dim);

  // (2) local embedders; nothing leaves the client
  if (uses_embedder(variant)) {
    ledger.touch(phase::kLocalPretraining);
    for_each_client(M, cfg.threads, [&](int i) {
      ClientState& c = clients[i];
      c.embedder = train_local_gnn(c.view, c.split, dz, cfg.embed_layers, options,
                                   derive_seed(cfg.seed, client_stream(i, kEmbedder)));
    });
  }

  // (3) prototypes
  if (variant == Variant::kFedDep || variant == Variant::kFedDepNoDGen) {
    for_each_client(M, cfg.threads, [&](int i) {
      ClientState& c = clients[i];
      c.prototypes = build_prototypes(
          i, c.embedder->embeddings, static_cast<std::size_t>(cfg.prototypes),
          derive_seed(cfg.seed, client_stream(i, kPrototypes)), cfg.kmeans_iters);
    });
    for (const auto& c : clients) result.prototypes.push_back(*c.prototypes);
    if (variant == Variant::kFedDep) {
      ledger.touch(phase::kPrototypeBroadcast);
      const auto copies = broadcast_prototypes(result.prototypes, ledger);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
          if (j != i) clients[i].foreign.push_back(copies[i][j]);
    } else {
      for (auto& c : clients) mend_with_centroids(c);
    }
  }
  if (uses_generator(variant)) {
    ledger.touch(phase::kDGenTraining);
    DGenConfig gc;
    gc.input_dim = graph.feature_dim();
    gc.embed_dim = dz;
    gc.encoder_dim = dz;
    gc.encoder_layers = cfg.embed_layers;
    gc.max_count = cfg.max_count;
    gc.rate = cfg.sampler_rate;
    for (int i = 0; i < M; ++i) {
      Rng rng(derive_seed(cfg.seed, client_stream(i, kGenerator)));
      clients[i].dgen.emplace(gc, rng);
    }
  }
  for (auto& c : clients)
    if (c.mended.empty()) c.mended.assign(c.view.graph.node_count(), {});

  {
    std::vector<ImpairedView> views;
    for (const auto& c : clients) views.push_back(c.view);
    result.privacy = account_budget(cfg, views);
  }

  // (4) joint rounds
  FusedConfig fc;
  fc.input_dim = graph.feature_dim();
  fc.embed_dim = dz;
  fc.hidden_dim = dz;
  fc.num_classes = static_cast<std::size_t>(graph.num_classes);
  fc.layers = cfg.classifier_layers;
  {
    Rng rng(derive_seed(cfg.seed, kClassifierInitStream));
    result.global = FusedClassifier(fc, rng);
  }
  for (auto& c : clients) c.classifier = result.global;
  std::vector<Rng> rngs;
  for (int i = 0; i < M; ++i)
    rngs.emplace_back(derive_seed(cfg.seed, client_stream(i, kTraining)));
  std::vector<double> weights(M, 1.0);
  if (cfg.weighting == FedAvgWeighting::kSampleCount)
    for (int i = 0; i < M; ++i)
      weights[i] = static_cast<double>(clients[i].split.train.size());
  const bool aggregate = variant != Variant::kLocal;
  const std::size_t model_values = result.global.params().parameter_count();
  if (aggregate) {
    ledger.touch(phase::kClassifierDownload);
    ledger.touch(phase::kClassifierUpload);
  }

  for (int round = 1; round <= cfg.rounds; ++round) {
    const auto start = std::chrono::steady_clock::now();
    RoundLog log;
    log.round = round;
    log.classifier_loss.assign(M, 0.0);
    if (uses_generator(variant)) log.generator_loss.assign(M, 0.0);
    if (aggregate) {
      for (auto& c : clients) c.classifier = result.global;
      ledger.record(phase::kClassifierDownload, Link::kClientServer, M, M * model_values);
    }
    try {
      for_each_client(M, cfg.threads, [&](int i) {
        ClientState& c = clients[i];
        if (uses_generator(variant)) {
          log.generator_loss[i] = generator_epoch(ctx, i, rngs[i]);
          regenerate(ctx, i, rngs[i]);
        }
        log.classifier_loss[i] = train_fused_epoch(
            c.classifier, c.view.graph, c.mended, c.split.train, options, rngs[i]);
      });
    } catch (const DivergenceError& e) {
      throw DivergenceError("round " + std::to_string(round) + ": " + e.what());
    }
    if (aggregate) {
      ledger.record(phase::kClassifierUpload, Link::kClientServer, M, M * model_values);
      std::vector<FusedClassifier> replicas;
      for (const auto& c : clients) replicas.push_back(c.classifier);
      result.global = fedavg(replicas, weights);
      log.val_accuracy = evaluate_global(result.global, graph, val_queries);
      log.test_accuracy = evaluate_global(result.global, graph, test_queries);
    } else {
      for (const auto& c : clients) {
        log.val_accuracy += evaluate_global(c.classifier, graph, val_queries) / M;
        log.test_accuracy += evaluate_global(c.classifier, graph, test_queries) / M;
      }
    }
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    if (on_round) on_round(log);
    result.rounds.push_back(std::move(log));
  }

  // (5) final evaluation
  if (!aggregate)
    for (const auto& c : clients) result.local_models.push_back(c.classifier);
  result.final_val_accuracy = result.rounds.back().val_accuracy;
  result.final_test_accuracy = result.rounds.back().test_accuracy;
  return result;
}

RunResult run_training(const ExperimentConfig& config, const RoundCallback& on_round) {
  if (config.dataset.empty()) throw ArgumentError("config has no dataset path");
  const Graph g = load_graph(config.dataset);
  return run_training(config, g, on_round);
}

std::string comm_report(const CommLedger& ledger) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "phase" << std::right << std::setw(12)
      << "ic_msgs" << std::setw(14) << "ic_values" << std::setw(12) << "cs_msgs"
      << std::setw(14) << "cs_values" << '\n';
  for (const auto& [name, t] : ledger.phases())
    out << std::left << std::setw(22) << name << std::right << std::setw(12)
        << t.inter_client.messages << std::setw(14) << t.inter_client.values
        << std::setw(12) << t.client_server.messages << std::setw(14)
        << t.client_server.values << '\n';
  const Traffic ic = ledger.total(Link::kInterClient);
  const Traffic cs = ledger.total(Link::kClientServer);
  out << std::left << std::setw(22) << "total" << std::right << std::setw(12)
      << ic.messages << std::setw(14) << ic.values << std::setw(12) << cs.messages
      << std::setw(14) << cs.values << '\n';
  out << "generator traffic: " << ledger.generator_values() << " values\n";
  return out.str();
}

}  // namespace subfed
