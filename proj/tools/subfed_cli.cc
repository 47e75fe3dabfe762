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
// subfed command-line front end: partition, train, privacy, report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subfed/config.h"
#include "subfed/errors.h"
#include "subfed/fed.h"
#include "subfed/graph.h"
#include "subfed/louvain.h"
#include "subfed/privacy.h"
#include "subfed/report.h"

namespace fs = std::filesystem;
using namespace subfed;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

// Raised for bad user input detected after CLI parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
};

ExperimentConfig read_config_or_usage(const std::string& path) {
  if (path.empty()) throw UsageError("--config is required");
  try {
    ExperimentConfig c = load_config(path);
    c.validate();
    return c;
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_partition(const Globals& g, const std::string& graph_path, int clients) {
  if (g.out.empty()) throw UsageError("--out is required");
  if (clients < 1) throw UsageError("--clients must be >= 1");
  const Graph graph = load_graph(graph_path);
  const std::uint64_t seed = g.seed.value_or(0);
  const Partition p = louvain_partition(graph, clients, seed);
  fs::create_directories(g.out);
  for (std::size_t i = 0; i < p.subgraphs.size(); ++i) {
    std::ofstream out(fs::path(g.out) / ("client_" + std::to_string(i) + ".graph"));
    if (!out) throw std::runtime_error("cannot write into " + g.out);
    write_graph(p.subgraphs[i].graph, out,
                {"client " + std::to_string(i) + " of " + std::to_string(clients) +
                 ", seed " + std::to_string(seed)});
    std::ofstream ids(fs::path(g.out) / ("client_" + std::to_string(i) + ".ids"));
    for (NodeId v : p.subgraphs[i].global_ids) ids << v << '\n';
  }
  std::ofstream stats(fs::path(g.out) / "stats.json");
  write_partition_stats(graph, p, stats);
  std::cout << partition_table(graph, p);
  return kOk;
}

int cmd_train(const Globals& g, const std::optional<std::string>& variant,
              std::optional<int> repetitions, bool quiet) {
  ExperimentConfig config = read_config_or_usage(g.config);
  if (variant) {
    auto v = parse_variant(*variant);
    if (!v) throw UsageError("unknown variant '" + *variant + "'");
    config.variant = *v;
  }
  if (repetitions) {
    if (*repetitions < 1) throw UsageError("--repetitions must be >= 1");
    config.repetitions = *repetitions;
  }
  if (g.seed) config.seed = *g.seed;
  if (config.dataset.empty()) throw UsageError("config has no dataset");
  fs::path dataset = config.dataset;
  if (dataset.is_relative() && !fs::exists(dataset))
    dataset = fs::path(g.config).parent_path() / dataset;
  const Graph graph = load_graph(dataset);

  const fs::path out = g.out.empty() ? fs::path("runs") : fs::path(g.out);
  fs::create_directories(out);
  {
    std::ofstream snap(out / "config.snapshot", std::ios::binary);
    snap << read_bytes(g.config);
  }
  nlohmann::ordered_json manifest;
  manifest["config"] = "config.snapshot";
  manifest["variant"] = std::string(variant_name(config.variant));
  manifest["seeds"] = nlohmann::ordered_json::array();
  manifest["runs"] = nlohmann::ordered_json::array();

  std::vector<double> accuracies;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    ExperimentConfig run = config;
    run.seed = config.seed + static_cast<std::uint64_t>(rep);
    const std::string name = std::string(variant_name(run.variant)) + "_seed" +
                             std::to_string(run.seed);
    const RunResult result = run_training(run, graph, [&](const RoundLog& log) {
      if (quiet) return;
      double loss = 0.0;
      for (double l : log.classifier_loss) loss += l;
      loss /= static_cast<double>(log.classifier_loss.size());
      std::cerr << name << " round " << log.round << " loss " << std::fixed
                << std::setprecision(4) << loss << " val " << log.val_accuracy
                << " test " << log.test_accuracy << " (" << std::setprecision(1)
                << log.seconds << "s)\n";
    });
    write_run(result, out / name);
    manifest["seeds"].push_back(run.seed);
    manifest["runs"].push_back(name);
    accuracies.push_back(result.final_test_accuracy);
    std::cout << name << ": test accuracy " << std::fixed << std::setprecision(4)
              << result.final_test_accuracy << ", generator traffic "
              << result.ledger.generator_values() << " values, budget "
              << result.privacy.status;
    if (result.privacy.applicable && result.privacy.ok)
      std::cout << " (eps " << result.privacy.worst.epsilon << ", delta "
                << std::scientific << std::setprecision(3)
                << result.privacy.worst.delta << std::defaultfloat << ")";
    std::cout << '\n';
    if (rep == 0) std::cout << comm_report(result.ledger);
  }
  {
    std::ofstream m(out / "manifest.json");
    m << manifest.dump(2) << '\n';
  }
  std::cout << variant_name(config.variant) << ": accuracy " << std::fixed
            << std::setprecision(4) << mean_of(accuracies) << " +- "
            << population_std(accuracies) << " over " << accuracies.size()
            << " run(s)\n";
  return kOk;
}

void print_trace(const PrivacyBudget& b) {
  std::cout << std::left << std::setw(12) << "stage" << std::right << std::setw(16)
            << "epsilon" << std::setw(16) << "delta" << '\n';
  for (const auto& s : b.trace)
    std::cout << std::left << std::setw(12) << s.name << std::right << std::setprecision(6)
              << std::setw(16) << s.epsilon << std::setw(16) << s.delta << '\n';
}

struct PrivacyArgs {
  std::optional<std::size_t> D, d, N;
  std::optional<int> L;
  double r = 0.5;
  double delta_prime = 1e-4;
  bool printed = false;
  std::string graph;
};

int cmd_privacy(const Globals& g, const PrivacyArgs& a) {
  const DeltaComposition mode =
      a.printed ? DeltaComposition::kPrintedForm : DeltaComposition::kFailureProbability;
  if (!a.graph.empty()) {
    ExperimentConfig config = read_config_or_usage(g.config);
    if (g.seed) config.seed = *g.seed;
    const Graph graph = load_graph(a.graph);
    if (a.printed) config.printed_delta = true;
    const Federation fed = prepare_federation(config, graph);
    const BudgetReport report = account_budget(config, fed.views);
    if (!g.out.empty()) {
      std::ofstream json_out(g.out);
      if (!json_out) throw std::runtime_error("cannot write " + g.out);
      write_budget(report, json_out);
    }
    if (!report.applicable) {
      std::cout << "variant " << variant_name(config.variant)
                << " releases nothing derived from local edges\n";
      return kOk;
    }
    for (const auto& c : report.clients) {
      std::cout << "client " << c.client << ": D = " << c.degree.degree;
      if (c.ok)
        std::cout << ", epsilon = " << c.budget.epsilon << ", delta = "
                  << c.budget.delta << '\n';
      else
        std::cout << " (" << c.status << ")\n";
    }
    if (report.worst_client >= 0) {
      std::cout << "worst case: client " << report.worst_client << '\n';
      print_trace(report.worst);
    }
    const bool violated = !report.ok;
    return violated ? kRuntimeError : kOk;
  }
  if (!a.D || !a.d || !a.L || !a.N)
    throw UsageError("--D, --d, --L and --N are required without --graph");
  if (a.r < 0.0 || a.r > 1.0) throw UsageError("--r must be in [0, 1]");
  if (!(a.delta_prime > 0.0 && a.delta_prime < 1.0))
    throw UsageError("--delta-prime must be in (0, 1)");
  AccountantInput input;
  input.min_degree = *a.D;
  input.fanout = *a.d;
  input.layers = *a.L;
  input.epochs = static_cast<int>(*a.N);
  input.rate = a.r;
  input.delta_prime = a.delta_prime;
  input.delta_mode = mode;
  print_trace(feddep_budget(input));
  return kOk;
}

int cmd_report(const Globals& g, const std::string& run_dir) {
  const auto runs = collect_runs(run_dir);
  const auto rows = aggregate_runs(runs);
  std::cout << render_report(rows);
  const fs::path out = g.out.empty() ? fs::path(run_dir) / "report.json"
                                     : fs::path(g.out);
  std::ofstream json_out(out);
  if (!json_out) throw std::runtime_error("cannot write " + out.string());
  write_report_json(rows, json_out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgraph federated learning with private neighbour generation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    globals.seed = seed;
  });
  app.add_option("--out", globals.out, "output directory or file");
  app.add_option("--config", globals.config, "experiment config file");

  auto* partition = app.add_subcommand("partition", "split a graph into client subgraphs");
  std::string graph_path;
  int clients = 3;
  partition->add_option("--graph", graph_path, "graph file")->required();
  partition->add_option("--clients", clients, "number of clients M");

  auto* train = app.add_subcommand("train", "run a training experiment");
  std::string variant_text;
  int reps = 0;
  bool quiet = false;
  auto* variant_opt = train->add_option("--variant", variant_text,
                                        "local|fedavg|feddep_no_dgen|feddep_no_proto|feddep");
  auto* reps_opt = train->add_option("--repetitions", reps, "number of seeds");
  train->add_flag("--quiet", quiet, "no per-round progress");

  auto* privacy = app.add_subcommand("privacy", "edge-LDP budget of a training run");
  PrivacyArgs pa;
  privacy->add_option("--D", pa.D, "minimum relevant degree");
  privacy->add_option("--d", pa.d, "neighbour fanout");
  privacy->add_option("--L", pa.L, "embedding layers");
  privacy->add_option("--N", pa.N, "training epochs");
  privacy->add_option("--r", pa.r, "sampler keep rate")->capture_default_str();
  privacy->add_option("--delta-prime", pa.delta_prime, "composition slack")
      ->capture_default_str();
  privacy->add_flag("--printed-delta", pa.printed, "audit form of the composed delta");
  privacy->add_option("--graph", pa.graph, "graph file (with --config)");

  auto* report = app.add_subcommand("report", "compare completed runs");
  std::string run_dir;
  report->add_option("run_dir", run_dir, "directory holding runs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*partition) return cmd_partition(globals, graph_path, clients);
    if (*train)
      return cmd_train(globals,
                       variant_opt->count() ? std::optional(variant_text) : std::nullopt,
                       reps_opt->count() ? std::optional(reps) : std::nullopt, quiet);
    if (*privacy) return cmd_privacy(globals, pa);
    if (*report) return cmd_report(globals, run_dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
