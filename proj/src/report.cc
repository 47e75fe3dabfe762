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
#include "subfed/report.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "subfed/errors.h"

namespace subfed {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

json traffic_json(const Traffic& t) {
  json j;
  j["messages"] = t.messages;
  j["values"] = t.values;
  return j;
}

json budget_json(const PrivacyBudget& b) {
  json j;
  j["epsilon"] = b.epsilon;
  j["delta"] = b.delta;
  j["trace"] = json::array();
  for (const auto& s : b.trace)
    j["trace"].push_back({{"stage", s.name}, {"epsilon", s.epsilon}, {"delta", s.delta}});
  return j;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string metrics_line(const RoundLog& log) {
  json j;
  j["round"] = log.round;
  j["classifier_loss"] = log.classifier_loss;
  j["generator_loss"] = log.generator_loss;
  j["val_accuracy"] = log.val_accuracy;
  j["test_accuracy"] = log.test_accuracy;
  j["seconds"] = log.seconds;
  return j.dump();
}

void write_metrics(const std::vector<RoundLog>& rounds, std::ostream& out) {
  for (const auto& r : rounds) out << metrics_line(r) << '\n';
}

std::vector<RoundLog> read_metrics(std::istream& in) {
  std::vector<RoundLog> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      RoundLog r;
      r.round = j.at("round").get<int>();
      r.classifier_loss = j.at("classifier_loss").get<std::vector<double>>();
      r.generator_loss = j.at("generator_loss").get<std::vector<double>>();
      r.val_accuracy = j.at("val_accuracy").get<double>();
      r.test_accuracy = j.at("test_accuracy").get<double>();
      r.seconds = j.at("seconds").get<double>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(number, e.what());
    }
  }
  return out;
}

void write_ledger(const CommLedger& ledger, std::ostream& out) {
  json j;
  j["phases"] = json::array();
  for (const auto& [name, t] : ledger.phases())
    j["phases"].push_back({{"phase", name},
                           {"inter_client", traffic_json(t.inter_client)},
                           {"client_server", traffic_json(t.client_server)}});
  j["total_inter_client"] = traffic_json(ledger.total(Link::kInterClient));
  j["total_client_server"] = traffic_json(ledger.total(Link::kClientServer));
  j["generator_values"] = ledger.generator_values();
  out << j.dump(2) << '\n';
}

CommLedger read_ledger(std::istream& in) {
  CommLedger ledger;
  try {
    const json j = json::parse(in);
    for (const auto& p : j.at("phases")) {
      const std::string name = p.at("phase").get<std::string>();
      ledger.touch(name);
      const auto& ic = p.at("inter_client");
      const auto& cs = p.at("client_server");
      ledger.record(name, Link::kInterClient, ic.at("messages").get<std::size_t>(),
                    ic.at("values").get<std::size_t>());
      ledger.record(name, Link::kClientServer, cs.at("messages").get<std::size_t>(),
                    cs.at("values").get<std::size_t>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("ledger: ") + e.what());
  }
  return ledger;
}

void write_budget(const BudgetReport& report, std::ostream& out) {
  json j;
  j["applicable"] = report.applicable;
  j["status"] = report.status;
  j["worst_client"] = report.worst_client;
  j["worst"] = budget_json(report.worst);
  j["clients"] = json::array();
  for (const auto& c : report.clients) {
    json e;
    e["client"] = c.client;
    e["status"] = c.status;
    e["min_degree"] = c.degree.degree;
    e["min_degree_node"] = c.degree.node;
    e["budget"] = budget_json(c.budget);
    j["clients"].push_back(std::move(e));
  }
  out << j.dump(2) << '\n';
}

void write_prototypes(const std::vector<PrototypeSet>& sets, std::ostream& out) {
  json j = json::array();
  for (const auto& s : sets) {
    json e;
    e["owner"] = s.owner;
    e["member_counts"] = s.member_counts;
    e["centroids"] = json::array();
    for (std::size_t r = 0; r < s.size(); ++r) {
      auto row = s.centroids.row(r);
      e["centroids"].push_back(std::vector<double>(row.begin(), row.end()));
    }
    j.push_back(std::move(e));
  }
  out << j.dump() << '\n';
}

void write_summary(const RunResult& result, std::ostream& out) {
  json j;
  j["variant"] = std::string(variant_name(result.variant));
  j["seed"] = result.seed;
  j["rounds"] = result.rounds.size();
  j["final_val_accuracy"] = result.final_val_accuracy;
  j["final_test_accuracy"] = result.final_test_accuracy;
  j["client_nodes"] = result.partition.nodes;
  j["client_edges"] = result.partition.edges;
  j["dropped_edges"] = result.partition.dropped_edges;
  j["dropped_fraction"] = result.partition.dropped_fraction;
  j["generator_values"] = result.ledger.generator_values();
  j["budget_status"] = result.privacy.status;
  out << j.dump(2) << '\n';
}

void write_run(const RunResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / kMetricsFile);
    write_metrics(result.rounds, out);
  }
  {
    auto out = open_out(dir / kLedgerFile);
    write_ledger(result.ledger, out);
  }
  {
    auto out = open_out(dir / kBudgetFile);
    write_budget(result.privacy, out);
  }
  if (!result.prototypes.empty()) {
    auto out = open_out(dir / kPrototypesFile);
    write_prototypes(result.prototypes, out);
  }
  auto out = open_out(dir / kSummaryFile);
  write_summary(result, out);
}

void write_partition_stats(const Graph& g, const Partition& p, std::ostream& out) {
  json j;
  j["clients"] = p.subgraphs.size();
  j["global_nodes"] = g.node_count();
  j["global_edges"] = g.edge_count();
  std::vector<std::size_t> nodes, edges;
  for (const auto& s : p.subgraphs) {
    nodes.push_back(s.graph.node_count());
    edges.push_back(s.graph.edge_count());
  }
  j["client_nodes"] = nodes;
  j["client_edges"] = edges;
  j["avg_nodes"] = static_cast<double>(g.node_count()) /
                   static_cast<double>(p.subgraphs.size());
  double e = 0;
  for (auto x : edges) e += static_cast<double>(x);
  j["avg_edges"] = e / static_cast<double>(p.subgraphs.size());
  j["dropped_edges"] = p.dropped_edges;
  j["dropped_fraction"] = p.dropped_fraction;
  out << j.dump(2) << '\n';
}

std::string partition_table(const Graph& g, const Partition& p) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "client" << std::right << std::setw(10)
      << "|V_i|" << std::setw(10) << "|E_i|" << '\n';
  for (std::size_t i = 0; i < p.subgraphs.size(); ++i)
    out << std::left << std::setw(8) << i << std::right << std::setw(10)
        << p.subgraphs[i].graph.node_count() << std::setw(10)
        << p.subgraphs[i].graph.edge_count() << '\n';
  out << "global |V| = " << g.node_count() << ", |E| = " << g.edge_count() << '\n'
      << "dropped edges = " << p.dropped_edges << " (" << std::fixed
      << std::setprecision(4) << p.dropped_fraction << " of |E|)\n";
  return out.str();
}

RunRecord load_run(const fs::path& dir) {
  RunRecord r;
  r.dir = dir;
  const json summary = read_json_file(dir / kSummaryFile);
  try {
    r.variant = summary.at("variant").get<std::string>();
    r.seed = summary.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw SchemaError((dir / kSummaryFile).string() + ": " + e.what());
  }
  // Accuracy and traffic come from the raw per-round and ledger files.
  std::ifstream metrics(dir / kMetricsFile);
  if (!metrics) throw std::runtime_error("cannot open " + (dir / kMetricsFile).string());
  const auto rounds = read_metrics(metrics);
  if (rounds.empty()) throw SchemaError((dir / kMetricsFile).string() + ": no rounds");
  r.test_accuracy = rounds.back().test_accuracy;
  r.val_accuracy = rounds.back().val_accuracy;
  std::ifstream ledger_in(dir / kLedgerFile);
  if (!ledger_in) throw std::runtime_error("cannot open " + (dir / kLedgerFile).string());
  const CommLedger ledger = read_ledger(ledger_in);
  r.generator_values = ledger.generator_values();
  r.total_values =
      ledger.total(Link::kInterClient).values + ledger.total(Link::kClientServer).values;
  const json budget = read_json_file(dir / kBudgetFile);
  try {
    r.budget_applicable = budget.at("applicable").get<bool>();
    r.budget_ok = budget.at("status").get<std::string>() == "ok";
    r.epsilon = budget.at("worst").at("epsilon").get<double>();
    r.delta = budget.at("worst").at("delta").get<double>();
  } catch (const json::exception& e) {
    throw SchemaError((dir / kBudgetFile).string() + ": " + e.what());
  }
  return r;
}

std::vector<RunRecord> collect_runs(const fs::path& root) {
  if (!fs::is_directory(root)) throw ArgumentError(root.string() + " is not a directory");
  std::vector<fs::path> dirs;
  if (fs::exists(root / kSummaryFile)) dirs.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / kSummaryFile))
      dirs.push_back(entry.path());
  if (dirs.empty()) throw ArgumentError("no completed runs under " + root.string());
  std::sort(dirs.begin(), dirs.end());
  std::vector<RunRecord> out;
  for (const auto& d : dirs) out.push_back(load_run(d));
  return out;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

std::vector<VariantRow> aggregate_runs(const std::vector<RunRecord>& runs) {
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) groups[r.variant].push_back(&r);
  std::vector<VariantRow> rows;
  for (const auto& [name, members] : groups) {
    VariantRow row;
    row.variant = name;
    row.runs = members.size();
    std::vector<double> acc, gen, tot;
    for (const RunRecord* r : members) {
      acc.push_back(r->test_accuracy);
      gen.push_back(static_cast<double>(r->generator_values));
      tot.push_back(static_cast<double>(r->total_values));
      if (r->budget_applicable) row.budget_applicable = true;
      if (r->budget_applicable && !r->budget_ok) row.budget_violated = true;
      if (r->budget_applicable && r->budget_ok) {
        row.epsilon = std::max(row.epsilon, r->epsilon);
        row.delta = std::max(row.delta, r->delta);
      }
    }
    row.accuracy_mean = mean_of(acc);
    row.accuracy_std = population_std(acc);
    row.generator_values = mean_of(gen);
    row.total_values = mean_of(tot);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.accuracy_mean != b.accuracy_mean) return a.accuracy_mean > b.accuracy_mean;
    return a.variant < b.variant;
  });
  return rows;
}

std::string render_report(const std::vector<VariantRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "variant" << std::right << std::setw(6) << "runs"
      << std::setw(10) << "acc_mean" << std::setw(10) << "acc_std" << std::setw(16)
      << "gen_values" << std::setw(16) << "total_values" << std::setw(12) << "epsilon"
      << std::setw(12) << "delta" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.variant << std::right << std::setw(6)
        << r.runs << std::fixed << std::setprecision(4) << std::setw(10)
        << r.accuracy_mean << std::setw(10) << r.accuracy_std << std::setprecision(0)
        << std::setw(16) << r.generator_values << std::setw(16) << r.total_values;
    if (r.budget_violated)
      out << std::setw(12) << "violated" << std::setw(12) << "-";
    else if (r.budget_applicable)
      out << std::setprecision(4) << std::setw(12) << r.epsilon << std::scientific
          << std::setprecision(3) << std::setw(12) << r.delta << std::defaultfloat;
    else
      out << std::setw(12) << "-" << std::setw(12) << "-";
    out << '\n';
  }
  return out.str();
}

void write_report_json(const std::vector<VariantRow>& rows, std::ostream& out) {
  json j = json::array();
  for (const auto& r : rows) {
    json e;
    e["variant"] = r.variant;
    e["runs"] = r.runs;
    e["accuracy_mean"] = r.accuracy_mean;
    e["accuracy_std"] = r.accuracy_std;
    e["generator_values"] = r.generator_values;
    e["total_values"] = r.total_values;
    e["budget"] = r.budget_violated     ? "violated"
                  : r.budget_applicable ? "ok"
                                        : "not applicable";
    if (r.budget_applicable && !r.budget_violated) {
      e["epsilon"] = r.epsilon;
      e["delta"] = r.delta;
    } else {
      e["epsilon"] = nullptr;
      e["delta"] = nullptr;
    }
    j.push_back(std::move(e));
  }
  out << j.dump(2) << '\n';
}

}  // namespace subfed
